import type {
  CampaignDetail,
  CampaignSummary,
  IdentityCluster,
  SequenceEntry,
} from "./types";

export const PLATFORMS = ["TW", "FB", "GP", "YT", "FL"] as const;

// Seeded suggestions for the free-text topic field.
export const TOPIC_SUGGESTIONS = [
  "Product Marketing",
  "Tech Support",
  "Pharmacy",
  "Loans",
  "Escort Service",
  "Travel",
  "Real Estate",
  "Education",
];

export const IDENTITY_HIGHLIGHT_THRESHOLD = 0.7;

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Render a number exactly as the API sent it; null/undefined become n/a.
 * The UI never rounds or recomputes API values. */
export function fmt(value: number | null | undefined): string {
  if (value === null || value === undefined) return "n/a";
  return String(value);
}

function field(name: string, value: number | null | undefined): string {
  return `<span data-field="${name}">${fmt(value)}</span>`;
}

export function renderQueueRow(c: CampaignSummary): string {
  const platforms = PLATFORMS.map(
    (p) => `<td>${field(`platform_breakdown.${p}`, c.platform_breakdown[p])}</td>`
  ).join("");
  const phones = c.phones.map((p) => escapeHtml(p.canonical)).join(", ");
  return `<tr data-campaign="${escapeHtml(c.campaign_id)}">
    <td>${escapeHtml(c.campaign_id)}</td>
    <td>${field("post_count", c.post_count)}</td>
    <td>${field("user_count", c.user_count)}</td>
    ${platforms}
    <td>${phones}</td>
    <td>${escapeHtml(c.label)}</td>
    <td>${escapeHtml(c.topic ?? "")}</td>
    <td>${c.auto_flag ? "⚑" : ""}</td>
    <td>${field("suspension_fraction", c.suspension_fraction)}</td>
  </tr>`;
}

export function renderQueue(campaigns: CampaignSummary[]): string {
  if (campaigns.length === 0) {
    return `<div class="empty-state">No campaigns match the current filters.</div>`;
  }
  const header = `<tr><th>campaign</th><th>posts</th><th>users</th>` +
    PLATFORMS.map((p) => `<th>${p}</th>`).join("") +
    `<th>phones</th><th>label</th><th>topic</th><th>flag</th><th>susp</th></tr>`;
  return `<table class="queue">${header}${campaigns
    .map(renderQueueRow)
    .join("")}</table>`;
}

export function renderPhoneList(detail: CampaignDetail): string {
  const items = detail.phones.map((p) => {
    const badge =
      p.line_type === "toll_free"
        ? ` <span class="badge badge-tollfree">toll-free</span>`
        : "";
    return `<li>${escapeHtml(p.canonical)} (${escapeHtml(p.country)})${badge}</li>`;
  });
  return `<ul class="phones">${items.join("")}</ul>`;
}

export function renderIdentityClusters(clusters: IdentityCluster[]): string {
  if (clusters.length === 0) {
    return `<div class="empty-state">No cross-account identity matches.</div>`;
  }
  const rows = clusters.flatMap((cluster, i) =>
    cluster.evidence.map((e) => {
      const strong = e.score >= IDENTITY_HIGHLIGHT_THRESHOLD;
      return `<tr class="${strong ? "evidence-strong" : "evidence-weak"}">
        <td>${i}</td>
        <td>${e.pair.map((m) => escapeHtml(m.join("/"))).join(" ~ ")}</td>
        <td>${escapeHtml(e.feature)}</td>
        <td>${field("evidence.score", e.score)}</td>
      </tr>`;
    })
  );
  return `<table class="identities"><tr><th>cluster</th><th>pair</th><th>feature</th><th>score</th></tr>${rows.join("")}</table>`;
}

export function renderSequenceTimeline(entries: SequenceEntry[]): string {
  const rows = entries.map(
    (e) => `<tr>
      <td>${escapeHtml(e.phone)}</td>
      <td>${e.sequence.map(escapeHtml).join(" → ")}</td>
      <td>${field("sequence.inter_osn_latency", e.inter_osn_latency)}</td>
    </tr>`
  );
  return `<table class="sequences"><tr><th>phone</th><th>propagation</th><th>latency (s)</th></tr>${rows.join("")}</table>`;
}

export function renderDetail(detail: CampaignDetail): string {
  const m = detail.metrics;
  const sample = detail.post_sample
    .map(
      (p) => `<li>[${p.platform}] ${escapeHtml(p.text)}</li>`
    )
    .join("");
  const automation = m.automation
    ? `automation fraction ${field("automation.fraction", m.automation.fraction)}`
    : `automation fraction n/a`;
  const visibility = m.visibility.available
    ? `visibility total ${field("visibility.raw.total", m.visibility.raw.total)},
       adjusted ${field("visibility.adjusted_total", m.visibility.adjusted_total)}`
    : `visibility total ${field("visibility.raw.total", m.visibility.raw.total)} (no collusion data)`;
  const history = detail.label_history
    .map((h) => `<li>${escapeHtml(JSON.stringify(h))}</li>`)
    .join("");
  return `<section class="detail" data-campaign="${escapeHtml(detail.campaign_id)}">
    <h2>${escapeHtml(detail.campaign_id)}</h2>
    <p>${field("post_count", detail.post_count)} posts,
       ${field("user_count", detail.user_count)} accounts,
       origin ${escapeHtml(detail.origin_country ?? "unknown")}</p>
    <p>${automation}</p>
    <p>${visibility}</p>
    <p>suspended ${field("suspension.suspended_count", m.suspension.suspended_count)}
       of ${field("suspension.total_accounts", m.suspension.total_accounts)}</p>
    <h3>Phones</h3>${renderPhoneList(detail)}
    <h3>Propagation</h3>${renderSequenceTimeline(m.sequence.per_phone)}
    <h3>Identity evidence</h3>${renderIdentityClusters(detail.identity_clusters)}
    <h3>Posts</h3><ul class="sample">${sample}</ul>
    <h3>Label history</h3><ul class="history">${history}</ul>
  </section>`;
}

export function renderNotFound(campaignId: string): string {
  return `<div class="not-found">Campaign ${escapeHtml(campaignId)} does not exist in this run.</div>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)} <button data-action="retry">Retry</button></div>`;
}

/** Pull every data-field value out of rendered HTML, for contract checks. */
export function extractFields(html: string): Map<string, string[]> {
  const out = new Map<string, string[]>();
  const re = /data-field="([^"]+)">([^<]*)</g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(html)) !== null) {
    const list = out.get(m[1]) ?? [];
    list.push(m[2]);
    out.set(m[1], list);
  }
  return out;
}
