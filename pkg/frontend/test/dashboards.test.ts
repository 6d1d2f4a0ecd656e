import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  DISPATCH_FIELDS,
  IDENTITY_FIELDS,
  complaintsView,
  earningsView,
  pollView,
  profileFields,
  ratingsView,
} from "../src/dashboards.js";
import type {
  ComplaintsResponse,
  EarningsResponse,
  PollDto,
  ProfileResponse,
  RatingsResponse,
} from "../src/types.js";

const fixturesDir = join(__dirname, "..", "fixtures");

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(fixturesDir, `${name}.json`), "utf-8")) as T;
}

describe("profile editor", () => {
  const profile = fixture<ProfileResponse>("profile");
  const lockedUntil = profile.profile.settings_lock.locked_until!;

  it("disables locked dispatch settings and shows the disclosed date", () => {
    const beforeExpiry = Date.parse(lockedUntil) - 60_000;
    const fields = profileFields(profile, beforeExpiry);
    for (const name of DISPATCH_FIELDS) {
      const field = fields.find((f) => f.field === name)!;
      expect(field.editable).toBe(false);
      expect(field.lockNote).toContain(lockedUntil.slice(0, 10)); // the disclosed day
    }
  });

  it("keeps identity fields editable while the lock holds", () => {
    const beforeExpiry = Date.parse(lockedUntil) - 60_000;
    const fields = profileFields(profile, beforeExpiry);
    for (const name of IDENTITY_FIELDS) {
      const field = fields.find((f) => f.field === name)!;
      expect(field.editable).toBe(true);
      expect(field.lockNote).toBeNull();
    }
  });

  it("re-enables everything after the lock expires", () => {
    const afterExpiry = Date.parse(lockedUntil) + 60_000;
    for (const field of profileFields(profile, afterExpiry)) {
      expect(field.editable).toBe(true);
    }
  });

  it("matches the lock surfaced by the rejected patch", () => {
    const rejected = fixture<{ status: number; body: { detail: { locked_until: string } } }>(
      "profile_patch_locked",
    );
    expect(rejected.status).toBe(423);
    expect(rejected.body.detail.locked_until).toBe(lockedUntil);
  });
});

describe("earnings dashboard", () => {
  const earnings = fixture<EarningsResponse>("earnings");

  it("shows server money values verbatim", () => {
    const view = earningsView(earnings);
    const trip = earnings.trips[0];
    const row = view.rows[0];
    const cents = (c: number) =>
      `$${Math.floor(Math.abs(c) / 100)}.${String(Math.abs(c) % 100).padStart(2, "0")}`;
    expect(row.net).toBe(cents(trip.breakdown.net_c));
    expect(row.tco).toBe(cents(trip.breakdown.tco_c));
    expect(view.todayText).toBe(cents(earnings.earnings_today_c));
  });

  it("re-verifies the server's breakdown identities on every row", () => {
    const view = earningsView(earnings);
    expect(view.rows.length).toBeGreaterThan(0);
    expect(view.allIdentitiesHold).toBe(true);
    for (const row of view.rows) expect(row.identitiesHold).toBe(true);
  });

  it("shows goal progress from the server state label", () => {
    const view = earningsView(earnings);
    expect(view.goal).not.toBeNull();
    expect(["behind", "on_track", "met"]).toContain(view.goal!.state);
  });
});

describe("ratings dashboard", () => {
  const ratings = fixture<RatingsResponse>("ratings");

  it("offers the dispute button only on verifiable factors", () => {
    const view = ratingsView(ratings);
    const byFactor = Object.fromEntries(view.factors.map((f) => [f.factor, f]));
    expect(byFactor["punctuality"].disputeEnabled).toBe(true);
    expect(byFactor["politeness"].disputeEnabled).toBe(false);
    expect(byFactor["cleanliness"].disputeEnabled).toBe(false);
    expect(byFactor["conversation"].disputeEnabled).toBe(false);
  });

  it("renders per-factor means from server aggregates", () => {
    const view = ratingsView(ratings);
    const punctuality = ratings.aggregates.find((a) => a.factor === "punctuality")!;
    const shown = view.factors.find((f) => f.factor === "punctuality")!;
    expect(shown.meanText).toBe(punctuality.mean!.toFixed(2));
    expect(shown.count).toBe(punctuality.count);
  });

  it("reflects an upheld dispute as an excluded record", () => {
    const after = fixture<RatingsResponse>("ratings_after_dispute");
    const view = ratingsView(after);
    expect(view.records[0].status).toBe("excluded");
    const punctuality = view.factors.find((f) => f.factor === "punctuality")!;
    expect(punctuality.count).toBe(0); // excluded ratings leave the aggregates
  });
});

describe("complaints dashboard", () => {
  it("lists status and the disclosed expected completion", () => {
    const complaints = fixture<ComplaintsResponse>("complaints");
    const view = complaintsView(complaints);
    expect(view.length).toBe(1);
    expect(view[0].status).toBe("in_review");
    expect(view[0].expectedCompletion).toContain("2026-03-08");
    expect(view[0].history.length).toBe(2);
  });
});

describe("forum polls", () => {
  it("tallies votes per option from the server", () => {
    const polls = fixture<{ polls: PollDto[] }>("forum_polls");
    const view = pollView(polls.polls[0]);
    expect(view.totalVotes).toBe(1);
    expect(view.options.find((o) => o.option === "yes")!.votes).toBe(1);
    expect(view.open).toBe(true);
  });
});
