export interface PhoneNumber {
  canonical: string;
  country_code: number | null;
  country: string;
  line_type: string;
  explicit_international: boolean;
}

export interface CampaignSummary {
  campaign_id: string;
  post_count: number;
  user_count: number;
  platform_breakdown: Record<string, number>;
  phones: PhoneNumber[];
  label: string;
  topic: string | null;
  origin_country: string | null;
  auto_flag: boolean;
  flag_reasons: Record<string, string>[];
  eligible: boolean;
  suspension_fraction: number | null;
}

export interface CampaignList {
  campaigns: CampaignSummary[];
  run_id: string;
}

export interface PostSample {
  post_id: string;
  platform: string;
  user_id: string;
  timestamp: number;
  text: string;
  urls: string[];
  engagement: { likes: number; shares: number; reactions: number };
}

export interface IdentityEvidence {
  pair: string[][];
  score: number;
  feature: string;
}

export interface IdentityCluster {
  members: string[][];
  platforms: string[];
  evidence: IdentityEvidence[];
}

export interface SequenceEntry {
  phone: string;
  starting_platform: string;
  sequence: string[];
  inter_osn_latency: number | null;
}

export interface CampaignMetrics {
  campaign_id: string;
  post_count: number;
  per_platform_posts: Record<string, number>;
  automation: {
    fraction: number;
    client_distribution: Record<string, number>;
    messaging_keyword_fraction: number;
  } | null;
  suspension: {
    total_accounts: number;
    suspended_count: number;
    never_suspended_fraction: number | null;
    mean_lifetime_days: number | null;
  };
  visibility: {
    available: boolean;
    raw: { per_platform: Record<string, number>; total: number };
    adjusted_total?: number;
    colluder_contribution?: number;
  };
  sequence: { per_phone: SequenceEntry[] };
}

export interface CampaignDetail extends CampaignSummary {
  post_sample: PostSample[];
  label_history: Record<string, unknown>[];
  identity_clusters: IdentityCluster[];
  metrics: CampaignMetrics;
  run_id: string;
}

export interface LabelResult {
  campaign_id: string;
  label: string;
  topic: string | null;
  history_length: number;
  run_id: string;
}

export interface QueueFilters {
  label?: string;
  topic?: string;
  country?: string;
  platform?: string;
  min_posts?: number;
}
