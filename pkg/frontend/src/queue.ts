import type { ApiClient } from "./api";
import type { CampaignSummary, QueueFilters } from "./types";

export interface LabelOutcome {
  ok: boolean;
  error?: string;
  next: CampaignSummary | null;
}

/** Review-queue state: which campaigns are loaded, which one is up next,
 * and the single write the UI performs (label submission with optimistic
 * update and rollback). */
export class TriageQueue {
  campaigns: CampaignSummary[] = [];
  runId: string | null = null;
  filters: QueueFilters;

  constructor(private api: ApiClient, filters: QueueFilters = {}) {
    this.filters = filters;
  }

  async load(): Promise<void> {
    const list = await this.api.listCampaigns(this.filters);
    this.campaigns = list.campaigns;
    this.runId = list.run_id;
  }

  unreviewed(): CampaignSummary[] {
    return this.campaigns.filter((c) => c.label === "unreviewed");
  }

  next(): CampaignSummary | null {
    return this.unreviewed()[0] ?? null;
  }

  /** Spam verdicts need a topic; benign ones do not. */
  validate(verdict: string, topic: string): string | null {
    if (verdict !== "spam" && verdict !== "benign") {
      return `unknown verdict: ${verdict}`;
    }
    if (verdict === "spam" && topic.trim() === "") {
      return "a spam verdict needs a topic";
    }
    return null;
  }

  async submit(
    campaignId: string,
    verdict: "spam" | "benign",
    topic: string,
    reviewer: string
  ): Promise<LabelOutcome> {
    const invalid = this.validate(verdict, topic);
    if (invalid) return { ok: false, error: invalid, next: this.next() };
    const target = this.campaigns.find((c) => c.campaign_id === campaignId);
    if (!target) {
      return { ok: false, error: "campaign not in queue", next: this.next() };
    }
    const previous = { label: target.label, topic: target.topic };
    target.label = verdict;
    target.topic = topic;
    try {
      await this.api.submitLabel(
        campaignId,
        verdict,
        topic,
        reviewer,
        this.runId ?? undefined
      );
    } catch (err) {
      target.label = previous.label;
      target.topic = previous.topic;
      return {
        ok: false,
        error: err instanceof Error ? err.message : String(err),
        next: this.next(),
      };
    }
    return { ok: true, next: this.next() };
  }
}
