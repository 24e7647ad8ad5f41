import type {
  CampaignDetail,
  CampaignList,
  LabelResult,
  QueueFilters,
} from "./types";

export type FetchLike = (
  input: string,
  init?: RequestInit
) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike = fetch.bind(globalThis)
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.base}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        detail = (await resp.json()).detail ?? detail;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listCampaigns(filters: QueueFilters = {}): Promise<CampaignList> {
    const params = new URLSearchParams();
    if (filters.label) params.set("label", filters.label);
    if (filters.topic) params.set("topic", filters.topic);
    if (filters.country) params.set("country", filters.country);
    if (filters.platform) params.set("platform", filters.platform);
    if (filters.min_posts !== undefined) {
      params.set("min_posts", String(filters.min_posts));
    }
    const query = params.toString();
    return this.request<CampaignList>(`/campaigns${query ? `?${query}` : ""}`);
  }

  getCampaign(campaignId: string): Promise<CampaignDetail> {
    return this.request<CampaignDetail>(
      `/campaigns/${encodeURIComponent(campaignId)}`
    );
  }

  submitLabel(
    campaignId: string,
    verdict: "spam" | "benign",
    topic: string,
    reviewer: string,
    runId?: string
  ): Promise<LabelResult> {
    return this.request<LabelResult>(
      `/campaigns/${encodeURIComponent(campaignId)}/label`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          verdict,
          topic,
          reviewer,
          run_id: runId ?? null,
        }),
      }
    );
  }
}
