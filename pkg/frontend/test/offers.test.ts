// Contract tests against recorded platform API fixtures: the console
// must show server values verbatim and keep the decision loop honest.

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  applyDecision,
  applyExpiredVerdict,
  inboxFromResponse,
  offerCard,
  tickCountdowns,
} from "../src/offers.js";
import type { DecisionResponse, OffersResponse } from "../src/types.js";

const fixturesDir = join(__dirname, "..", "fixtures");

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(fixturesDir, `${name}.json`), "utf-8")) as T;
}

const bundle = fixture<OffersResponse>("offers_bundle");
const serverNow = Date.parse(bundle.server_time);

const PENALTY_WORDS = /penal|warning|strike|punish|demot|blacklist|suspend/i;

describe("offer cards", () => {
  it("display the server probability verbatim, rendered to two decimals", () => {
    for (const offer of bundle.offers) {
      const card = offerCard(offer, serverNow);
      expect(card.probability).toBe(offer.probability); // untouched raw value
      expect(card.probabilityText).toBe(offer.probability.toFixed(2));
    }
  });

  it("display the server incentive verbatim, and only when positive", () => {
    const withIncentive = bundle.offers.filter((o) => o.incentive_c > 0);
    const without = bundle.offers.filter((o) => o.incentive_c === 0);
    expect(withIncentive.length).toBeGreaterThan(0);
    expect(without.length).toBeGreaterThan(0);
    for (const offer of withIncentive) {
      const card = offerCard(offer, serverNow);
      expect(card.incentiveC).toBe(offer.incentive_c);
      const dollars = `$${Math.floor(offer.incentive_c / 100)}.${String(offer.incentive_c % 100).padStart(2, "0")}`;
      expect(card.incentiveText).toBe(dollars);
    }
    for (const offer of without) {
      expect(offerCard(offer, serverNow).incentiveText).toBeNull();
    }
  });

  it("show at most three factors with direction arrows", () => {
    for (const offer of bundle.offers) {
      const card = offerCard(offer, serverNow);
      expect(card.factorLines.length).toBeLessThanOrEqual(3);
      for (const line of card.factorLines) {
        expect(line).toMatch(/^[↑↓] /);
      }
    }
  });

  it("name the violated preference in a banner", () => {
    const violated = bundle.offers.find((o) => o.violated_preferences.length > 0);
    expect(violated).toBeDefined();
    const card = offerCard(violated!, serverNow);
    expect(card.violatedBanner).toContain("destination filter");
    expect(card.violatedBanner).toContain(violated!.violated_preferences[0].reason);
    const clean = bundle.offers.find((o) => o.violated_preferences.length === 0)!;
    expect(offerCard(clean, serverNow).violatedBanner).toBeNull();
  });

  it("never count down below zero", () => {
    const offer = bundle.offers[0];
    const longPast = Date.parse(offer.expires_at) + 5 * 60 * 1000;
    const card = offerCard(offer, longPast);
    expect(card.remainingSeconds).toBe(0);
    expect(card.countdownText).toBe("0:00");
    expect(card.expired).toBe(true);
  });

  it("drop expired cards without user action", () => {
    const inbox = inboxFromResponse(bundle, serverNow);
    expect(inbox.cards.length).toBe(bundle.offers.length);
    const afterExpiry = tickCountdowns(inbox, serverNow + 10 * 60 * 1000);
    expect(afterExpiry.cards).toHaveLength(0);
  });
});

describe("the at-most-one-accept bundle", () => {
  it("accepting one card disables the others", () => {
    const inbox = inboxFromResponse(bundle, serverNow);
    const accept = fixture<DecisionResponse>("decision_accept");
    const target = inbox.cards[0].offerId;
    const next = applyDecision(inbox, target, "accept", accept);
    expect(next.acceptedOfferId).toBe(target);
    for (const card of next.cards) {
      if (card.offerId === target) expect(card.disabled).toBe(false);
      else expect(card.disabled).toBe(true);
    }
  });

  it("declining dismisses the card with no penalty messaging anywhere", () => {
    const inbox = inboxFromResponse(bundle, serverNow);
    const target = inbox.cards[1].offerId;
    const next = applyDecision(inbox, target, "decline", { status: "declined", trip: null });
    expect(next.cards.map((c) => c.offerId)).not.toContain(target);
    expect(next.acceptedOfferId).toBeNull();
    const everything = JSON.stringify(next);
    expect(everything).not.toMatch(PENALTY_WORDS);
  });

  it("surfaces the server's expired verdict as a non-blocking notice", () => {
    const expired = fixture<{ status: number; body: { detail: { error: string } } }>(
      "decision_expired",
    );
    expect(expired.status).toBe(410);
    expect(expired.body.detail.error).toBe("expired");
    const inbox = inboxFromResponse(bundle, serverNow);
    const next = applyExpiredVerdict(inbox, inbox.cards[0].offerId);
    expect(next.notice).toMatch(/expired/);
    expect(next.notice).not.toMatch(PENALTY_WORDS);
    expect(next.cards.length).toBe(inbox.cards.length - 1);
  });
});
