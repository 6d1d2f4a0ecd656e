// Dashboard view models: profile lock state, itemized earnings, factor
// ratings with dispute affordances, complaints, and polls. All numbers
// come from the API; the earnings view re-verifies the server's own
// identities client-side but displays the server values either way.

import { money, shortDate } from "./format.js";
import type {
  ComplaintsResponse,
  EarningsResponse,
  PollDto,
  ProfileResponse,
  RatingsResponse,
} from "./types.js";

export const DISPATCH_FIELDS = [
  "earning_goal",
  "rating_floor",
  "employment_mode",
  "working_windows",
  "home_location",
  "home_route",
  "destination_filter",
  "ride_length_band",
  "assignment_mode",
] as const;

export const IDENTITY_FIELDS = ["name", "date_of_birth", "license_no", "car_info"] as const;

export interface ProfileFieldView {
  field: string;
  value: string;
  editable: boolean;
  lockNote: string | null;
}

export function profileFields(response: ProfileResponse, nowMs: number): ProfileFieldView[] {
  const profile = response.profile;
  const lockedUntil = profile.settings_lock.locked_until;
  const locked = lockedUntil !== null && Date.parse(lockedUntil) > nowMs;
  const lockNote = locked ? `locked until ${shortDate(lockedUntil!)}` : null;

  const show = (value: unknown): string =>
    value === null || value === undefined ? "—" : JSON.stringify(value);

  const fields: ProfileFieldView[] = [];
  for (const field of IDENTITY_FIELDS) {
    fields.push({
      field,
      value: String(profile[field] || "—"),
      editable: true,
      lockNote: null,
    });
  }
  for (const field of DISPATCH_FIELDS) {
    fields.push({
      field,
      value: show((profile as unknown as Record<string, unknown>)[field]),
      editable: !locked,
      lockNote,
    });
  }
  return fields;
}

export interface EarningsRow {
  tripId: string;
  completedAt: string;
  fare: string;
  incentive: string;
  tip: string;
  fuel: string;
  maintenance: string;
  fixed: string;
  tco: string;
  net: string;
  identitiesHold: boolean;
}

export interface EarningsView {
  todayText: string;
  weekText: string;
  goal: { label: string; state: string } | null;
  rows: EarningsRow[];
  allIdentitiesHold: boolean;
}

export function earningsView(response: EarningsResponse): EarningsView {
  const rows = response.trips.map((trip) => {
    const b = trip.breakdown;
    const identitiesHold =
      b.tco_c === b.fuel_c + b.maintenance_c + b.fixed_c &&
      b.net_c === b.fare_c + b.incentive_c + b.tip_c - b.tco_c;
    return {
      tripId: trip.trip_id,
      completedAt: shortDate(trip.completed_at),
      fare: money(b.fare_c),
      incentive: money(b.incentive_c),
      tip: money(b.tip_c),
      fuel: money(b.fuel_c),
      maintenance: money(b.maintenance_c),
      fixed: money(b.fixed_c),
      tco: money(b.tco_c),
      net: money(b.net_c),
      identitiesHold,
    };
  });
  return {
    todayText: money(response.earnings_today_c),
    weekText: money(response.earnings_week_c),
    goal: response.goal
      ? {
          label: `${money(response.goal.earned_c)} of ${money(response.goal.goal_c)} (${response.goal.period})`,
          state: response.goal.state,
        }
      : null,
    rows,
    allIdentitiesHold: rows.every((row) => row.identitiesHold),
  };
}

export interface FactorView {
  factor: string;
  meanText: string;
  count: number;
  alert: boolean;
  disputeEnabled: boolean;
}

export function ratingsView(response: RatingsResponse): {
  factors: FactorView[];
  records: { ratingId: string; tripId: string; status: string; scores: Record<string, number>; text: string | null }[];
} {
  const verifiable = new Set(response.verifiable_factors);
  return {
    factors: response.aggregates.map((aggregate) => ({
      factor: aggregate.factor,
      meanText: aggregate.mean === null ? "—" : aggregate.mean.toFixed(2),
      count: aggregate.count,
      alert: aggregate.alert,
      disputeEnabled: verifiable.has(aggregate.factor),
    })),
    records: response.records.map((record) => ({
      ratingId: record.rating_id,
      tripId: record.trip_id,
      status: record.status,
      scores: record.scores,
      text: record.text,
    })),
  };
}

export interface TicketView {
  ticketId: string;
  category: string;
  status: string;
  expectedCompletion: string;
  history: string[];
}

export function complaintsView(response: ComplaintsResponse): TicketView[] {
  return response.tickets.map((ticket) => ({
    ticketId: ticket.ticket_id,
    category: ticket.category,
    status: ticket.status,
    expectedCompletion: shortDate(ticket.expected_completion),
    history: ticket.history.map(([status, ts]) => `${status} at ${shortDate(ts)}`),
  }));
}

export function pollView(poll: PollDto): {
  pollId: string;
  question: string;
  open: boolean;
  options: { option: string; votes: number }[];
  totalVotes: number;
} {
  const options = poll.options.map((option) => ({
    option,
    votes: poll.tally[option] ?? 0,
  }));
  return {
    pollId: poll.poll_id,
    question: poll.question,
    open: poll.open,
    options,
    totalVotes: options.reduce((sum, o) => sum + o.votes, 0),
  };
}
