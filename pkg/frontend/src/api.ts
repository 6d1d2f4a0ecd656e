// Thin typed client over fetch. The fetch implementation is injectable
// so tests can replay recorded fixtures with controlled latency.

import type {
  ComplaintsResponse,
  DecisionResponse,
  EarningsResponse,
  OffersResponse,
  PollDto,
  ProfileResponse,
  RatingsResponse,
  TopicDto,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown,
  ) {
    super(`API error ${status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike = fetch.bind(globalThis),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    });
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, payload);
    }
    return payload as T;
  }

  driverId(): string {
    return this.token.replace(/^driver-/, "");
  }

  getOffers(driverId: string): Promise<OffersResponse> {
    return this.call("GET", `/drivers/${driverId}/offers`);
  }

  postDecision(offerId: string, decision: "accept" | "decline"): Promise<DecisionResponse> {
    return this.call("POST", `/offers/${offerId}/decision`, { decision });
  }

  getProfile(driverId: string): Promise<ProfileResponse> {
    return this.call("GET", `/drivers/${driverId}/profile`);
  }

  patchProfile(driverId: string, changes: Record<string, unknown>): Promise<unknown> {
    return this.call("PATCH", `/drivers/${driverId}/profile`, changes);
  }

  getEarnings(driverId: string): Promise<EarningsResponse> {
    return this.call("GET", `/drivers/${driverId}/earnings`);
  }

  getRatings(driverId: string): Promise<RatingsResponse> {
    return this.call("GET", `/drivers/${driverId}/ratings`);
  }

  postDispute(ratingId: string, factor: string, evidenceRef: string): Promise<unknown> {
    return this.call("POST", `/ratings/${ratingId}/dispute`, {
      factor,
      evidence_ref: evidenceRef,
    });
  }

  getComplaints(driverId: string): Promise<ComplaintsResponse> {
    return this.call("GET", `/drivers/${driverId}/complaints`);
  }

  postComplaint(driverId: string, category: string, text: string): Promise<unknown> {
    return this.call("POST", `/drivers/${driverId}/complaints`, { category, text });
  }

  getTopics(location?: string): Promise<{ topics: TopicDto[] }> {
    const query = location ? `?location=${encodeURIComponent(location)}` : "";
    return this.call("GET", `/forum/topics${query}`);
  }

  getPolls(): Promise<{ polls: PollDto[] }> {
    return this.call("GET", `/forum/polls`);
  }

  forumAction(action: string, payload: Record<string, unknown>): Promise<unknown> {
    return this.call("POST", `/forum/actions`, { action, payload });
  }

  getTransparency(driverId: string): Promise<Record<string, unknown>> {
    return this.call("GET", `/drivers/${driverId}/transparency`);
  }
}
