import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api";
import { TriageQueue } from "../src/queue";

// End-to-end flow against a live server; set API_BASE to enable, e.g.
//   API_BASE=http://127.0.0.1:8800 npx vitest run tests/triage_flow.test.ts
// The server must hold a freshly generated 20-campaign run (see
// scripts/make_live_run.py).
const API_BASE = process.env.API_BASE;

describe.skipIf(!API_BASE)("live triage flow", () => {
  it("labels a 20-campaign queue down to zero unreviewed", async () => {
    const api = new ApiClient(API_BASE!);
    const queue = new TriageQueue(api, { label: "unreviewed" });
    await queue.load();
    expect(queue.campaigns.length).toBe(20);

    let labeled = 0;
    while (queue.next()) {
      const current = queue.next()!;
      const verdict = labeled % 3 === 2 ? "benign" : "spam";
      const outcome = await queue.submit(
        current.campaign_id,
        verdict,
        verdict === "spam" ? "Product Marketing" : "",
        "flow-tester"
      );
      expect(outcome.ok).toBe(true);
      labeled += 1;
      expect(labeled).toBeLessThanOrEqual(20);
    }
    expect(labeled).toBe(20);

    const remaining = await api.listCampaigns({ label: "unreviewed" });
    expect(remaining.campaigns.length).toBe(0);

    const everything = await api.listCampaigns();
    let historyEntries = 0;
    for (const c of everything.campaigns) {
      const detail = await api.getCampaign(c.campaign_id);
      expect(["spam", "benign"]).toContain(detail.label);
      historyEntries += detail.label_history.length;
    }
    expect(historyEntries).toBe(20);
  });
});
