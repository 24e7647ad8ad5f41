import { ApiClient, ApiError } from "./api";
import { TriageQueue } from "./queue";
import {
  renderDetail,
  renderErrorBanner,
  renderNotFound,
  renderQueue,
  TOPIC_SUGGESTIONS,
} from "./views";
import type { QueueFilters } from "./types";

const api = new ApiClient("");
const queue = new TriageQueue(api);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function readFilters(): QueueFilters {
  const filters: QueueFilters = {};
  const label = (el("filter-label") as HTMLSelectElement).value;
  const minPosts = (el("filter-min-posts") as HTMLInputElement).value;
  const country = (el("filter-country") as HTMLInputElement).value;
  const platform = (el("filter-platform") as HTMLSelectElement).value;
  if (label) filters.label = label;
  if (minPosts) filters.min_posts = Number(minPosts);
  if (country) filters.country = country;
  if (platform) filters.platform = platform;
  return filters;
}

async function refreshQueue(): Promise<void> {
  queue.filters = readFilters();
  try {
    await queue.load();
    el("queue").innerHTML = renderQueue(queue.campaigns);
    el("banner").innerHTML = "";
    for (const row of document.querySelectorAll("tr[data-campaign]")) {
      row.addEventListener("click", () =>
        openDetail((row as HTMLElement).dataset.campaign!)
      );
    }
  } catch (err) {
    el("banner").innerHTML = renderErrorBanner(
      err instanceof Error ? err.message : String(err)
    );
    el("banner")
      .querySelector('[data-action="retry"]')
      ?.addEventListener("click", refreshQueue);
  }
}

async function openDetail(campaignId: string): Promise<void> {
  try {
    const detail = await api.getCampaign(campaignId);
    el("detail").innerHTML = renderDetail(detail);
    (el("label-campaign") as HTMLInputElement).value = campaignId;
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      el("detail").innerHTML = renderNotFound(campaignId);
    } else {
      el("banner").innerHTML = renderErrorBanner(
        err instanceof Error ? err.message : String(err)
      );
    }
  }
}

async function submitLabel(): Promise<void> {
  const campaignId = (el("label-campaign") as HTMLInputElement).value;
  const verdict = (el("label-verdict") as HTMLSelectElement).value as
    | "spam"
    | "benign";
  const topic = (el("label-topic") as HTMLInputElement).value;
  const reviewer = (el("label-reviewer") as HTMLInputElement).value || "analyst";
  const outcome = await queue.submit(campaignId, verdict, topic, reviewer);
  if (!outcome.ok) {
    if (outcome.error?.includes("stale")) {
      el("banner").innerHTML = renderErrorBanner(
        "This run was replaced on the server; reload the page."
      );
    } else {
      el("banner").innerHTML = renderErrorBanner(outcome.error ?? "label failed");
    }
    return;
  }
  await refreshQueue();
  if (outcome.next) {
    await openDetail(outcome.next.campaign_id);
  } else {
    el("detail").innerHTML =
      '<div class="empty-state">Queue clear: no unreviewed campaigns.</div>';
  }
}

function init(): void {
  const datalist = el("topic-suggestions");
  datalist.innerHTML = TOPIC_SUGGESTIONS.map(
    (t) => `<option value="${t}"></option>`
  ).join("");
  el("filters-apply").addEventListener("click", refreshQueue);
  el("label-submit").addEventListener("click", submitLabel);
  void refreshQueue();
}

document.addEventListener("DOMContentLoaded", init);
