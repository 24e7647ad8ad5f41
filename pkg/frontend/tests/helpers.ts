import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import type { FetchLike } from "../src/api";
import type { CampaignDetail, CampaignList } from "../src/types";

const FIXTURE_DIR = join(__dirname, "fixtures");

export function loadListing(): CampaignList {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, "campaigns.json"), "utf8"));
}

export function loadDetails(): CampaignDetail[] {
  return readdirSync(FIXTURE_DIR)
    .filter((f) => f.startsWith("campaign_detail_"))
    .sort()
    .map((f) => JSON.parse(readFileSync(join(FIXTURE_DIR, f), "utf8")));
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** In-memory stand-in for the triage API, seeded from recorded fixtures.
 * Label POSTs mutate state the same way the real server does, so label
 * round-trips can be asserted without a network. */
export function fixtureServer(): { fetch: FetchLike; details: Map<string, CampaignDetail> } {
  const listing = loadListing();
  const details = new Map(loadDetails().map((d) => [d.campaign_id, d]));

  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://fixtures");
    const parts = url.pathname.split("/").filter(Boolean);

    if (parts[0] !== "campaigns") return json({ detail: "not found" }, 404);

    if (parts.length === 1) {
      let rows = listing.campaigns.map((c) => {
        const d = details.get(c.campaign_id);
        return d ? { ...c, label: d.label, topic: d.topic } : c;
      });
      const label = url.searchParams.get("label");
      if (label) rows = rows.filter((c) => c.label === label);
      const minPosts = url.searchParams.get("min_posts");
      if (minPosts) rows = rows.filter((c) => c.post_count >= Number(minPosts));
      return json({ campaigns: rows, run_id: listing.run_id });
    }

    const detail = details.get(parts[1]);
    if (!detail) return json({ detail: `unknown campaign ${parts[1]}` }, 404);

    if (parts.length === 2 && (!init || init.method === undefined)) {
      return json(detail);
    }

    if (parts[2] === "label" && init?.method === "POST") {
      const body = JSON.parse(String(init.body));
      if (body.run_id && body.run_id !== listing.run_id) {
        return json({ detail: "label submitted against a stale run" }, 409);
      }
      if (body.verdict !== "spam" && body.verdict !== "benign") {
        return json({ detail: `bad_verdict: ${body.verdict}` }, 400);
      }
      detail.label = body.verdict;
      detail.topic = body.topic;
      detail.label_history.push({
        verdict: body.verdict,
        topic: body.topic,
        reviewer: body.reviewer,
      });
      return json({
        campaign_id: detail.campaign_id,
        label: detail.label,
        topic: detail.topic,
        history_length: detail.label_history.length,
        run_id: listing.run_id,
      });
    }
    return json({ detail: "not found" }, 404);
  };

  return { fetch: fetchImpl, details };
}
