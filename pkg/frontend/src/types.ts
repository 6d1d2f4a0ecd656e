// Payload shapes as the platform API serves them. The console renders
// these values verbatim; it never computes its own probability,
// incentive, or earnings numbers.

export interface FactorDto {
  factor: string;
  impact: number;
  direction: "raises" | "lowers";
}

export interface ViolationDto {
  preference: string;
  reason: string;
}

export interface OfferDto {
  offer_id: string;
  request_id: string;
  driver_id: string;
  probability: number;
  factors: FactorDto[];
  incentive_c: number;
  violated_preferences: ViolationDto[];
  issued_at: string;
  expires_at: string;
  evidence: Record<string, string>;
  fare_c: number;
  pickup_eta_minutes: number;
  duration_minutes: number;
  distance_km: number;
  destination_category: string;
  rider_rating: number;
  traffic: boolean;
  area_type: string;
  route_issues: string | null;
}

export interface OffersResponse {
  bundle_id: string | null;
  at_most_one_accept: boolean;
  offers: OfferDto[];
  server_time: string;
}

export interface TripDto {
  request_id: string;
  offer_id: string;
  accepted_at: string;
  pickup_eta_minutes: number;
  duration_minutes: number;
  distance_km: number;
  fare_c: number;
  incentive_c: number;
  dropoff: number[];
  destination_category: string;
}

export interface DecisionResponse {
  status: string;
  trip: TripDto | null;
}

export interface BreakdownDto {
  fare_c: number;
  incentive_c: number;
  tip_c: number;
  fuel_c: number;
  maintenance_c: number;
  fixed_c: number;
  tco_c: number;
  net_c: number;
}

export interface CompletedTripDto {
  trip_id: string;
  driver_id: string;
  completed_at: string;
  duration_hours: number;
  breakdown: BreakdownDto;
}

export interface GoalDto {
  period: string;
  goal_c: number;
  earned_c: number;
  state: string;
}

export interface EarningsResponse {
  earnings_today_c: number;
  earnings_week_c: number;
  goal: GoalDto | null;
  trips: CompletedTripDto[];
}

export interface SettingsLockDto {
  locked_until: string | null;
  window_days: number;
}

export interface ProfileDto {
  driver_id: string;
  name: string;
  date_of_birth: string;
  license_no: string;
  car_info: string;
  earning_goal: { amount_c: number; period: string } | null;
  rating_floor: number | null;
  likes_tips: boolean;
  likes_conversation: boolean;
  employment_mode: string;
  working_windows: { weekday: number; start_minute: number; end_minute: number }[];
  home_location: number[];
  home_route: number[][] | null;
  destination_filter: string[];
  ride_length_band: number[] | null;
  assignment_mode: string;
  settings_lock: SettingsLockDto;
}

export interface ProfileResponse {
  profile: ProfileDto;
  state: {
    driver_id: string;
    location: number[];
    on_trip: boolean;
    queued_request_id: string | null;
    hours_driven_today: number;
    earnings_today_c: number;
    earnings_week_c: number;
    available: boolean;
  };
}

export interface RatingRecordDto {
  rating_id: string;
  trip_id: string;
  scores: Record<string, number>;
  text: string | null;
  prompt_id: string | null;
  created_at: string;
  status: string;
}

export interface FactorAggregateDto {
  factor: string;
  window: number;
  mean: number | null;
  count: number;
  alert: boolean;
}

export interface RatingsResponse {
  records: RatingRecordDto[];
  aggregates: FactorAggregateDto[];
  alerts: { factor: string; mean: number; count: number }[];
  verifiable_factors: string[];
}

export interface TicketDto {
  ticket_id: string;
  driver_id: string;
  category: string;
  text: string;
  status: string;
  opened_at: string;
  expected_completion: string;
  history: [string, string][];
}

export interface ComplaintsResponse {
  tickets: TicketDto[];
}

export interface TopicDto {
  topic_id: string;
  title: string;
  creator: string;
  location_tag: string | null;
  created_at: string;
}

export interface PollDto {
  poll_id: string;
  question: string;
  options: string[];
  open: boolean;
  tally: Record<string, number>;
  config_proposal: unknown;
}

export interface ApiErrorBody {
  detail: unknown;
}
