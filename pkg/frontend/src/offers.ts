// Offer inbox view model: cards, countdowns, and the at-most-one-accept
// state machine. Pure functions over API payloads so the decision loop
// is testable against recorded fixtures without a DOM.

import { countdownText, minutesText, money, probabilityText } from "./format.js";
import type { DecisionResponse, OfferDto, OffersResponse } from "./types.js";

export interface OfferCard {
  offerId: string;
  requestId: string;
  // raw server values, carried untouched for contract checks
  probability: number;
  incentiveC: number;
  fareC: number;
  // presentation
  probabilityText: string;
  factorLines: string[];
  incentiveText: string | null; // shown iff incentive > 0
  violatedBanner: string | null;
  fareText: string;
  etaText: string;
  durationText: string;
  destination: string;
  extraInfo: string[];
  expiresAt: string;
  remainingSeconds: number;
  countdownText: string;
  expired: boolean;
  disabled: boolean;
}

export interface InboxState {
  bundleId: string | null;
  atMostOneAccept: boolean;
  cards: OfferCard[];
  acceptedOfferId: string | null;
  notice: string | null; // non-blocking, e.g. an expiry race verdict
}

const ARROWS: Record<string, string> = { raises: "↑", lowers: "↓" };

export function remainingSeconds(expiresAtIso: string, nowMs: number): number {
  const remaining = Math.floor((Date.parse(expiresAtIso) - nowMs) / 1000);
  return Math.max(0, remaining); // the countdown never displays below 0
}

export function offerCard(offer: OfferDto, nowMs: number): OfferCard {
  const remaining = remainingSeconds(offer.expires_at, nowMs);
  const extraInfo: string[] = [];
  if (offer.traffic) extraInfo.push("heavy traffic");
  extraInfo.push(offer.area_type === "remote" ? "remote area" : "urban area");
  if (offer.route_issues) extraInfo.push(offer.route_issues);
  return {
    offerId: offer.offer_id,
    requestId: offer.request_id,
    probability: offer.probability,
    incentiveC: offer.incentive_c,
    fareC: offer.fare_c,
    probabilityText: probabilityText(offer.probability),
    factorLines: offer.factors
      .slice(0, 3)
      .map((f) => `${ARROWS[f.direction] ?? ""} ${f.factor}`),
    incentiveText: offer.incentive_c > 0 ? money(offer.incentive_c) : null,
    violatedBanner:
      offer.violated_preferences.length > 0
        ? offer.violated_preferences
            .map((v) => `Outside your ${v.preference.replace(/_/g, " ")}: ${v.reason}`)
            .join(" ")
        : null,
    fareText: money(offer.fare_c),
    etaText: minutesText(offer.pickup_eta_minutes),
    durationText: minutesText(offer.duration_minutes),
    destination: offer.destination_category,
    extraInfo,
    expiresAt: offer.expires_at,
    remainingSeconds: remaining,
    countdownText: countdownText(remaining),
    expired: remaining <= 0,
    disabled: false,
  };
}

export function inboxFromResponse(response: OffersResponse, nowMs: number): InboxState {
  return {
    bundleId: response.bundle_id,
    atMostOneAccept: response.at_most_one_accept,
    cards: response.offers.map((offer) => offerCard(offer, nowMs)),
    acceptedOfferId: null,
    notice: null,
  };
}

/** Refresh countdowns; expired cards disappear without user action. */
export function tickCountdowns(state: InboxState, nowMs: number): InboxState {
  const cards = state.cards
    .map((card) => {
      const remaining = remainingSeconds(card.expiresAt, nowMs);
      return {
        ...card,
        remainingSeconds: remaining,
        countdownText: countdownText(remaining),
        expired: remaining <= 0,
      };
    })
    .filter((card) => !card.expired);
  return { ...state, cards };
}

/**
 * Fold a decision response into the inbox. Accepting one card disables
 * its bundle siblings; a decline simply dismisses the card — the console
 * never editorializes about declining.
 */
export function applyDecision(
  state: InboxState,
  offerId: string,
  decision: "accept" | "decline",
  response: DecisionResponse,
): InboxState {
  if (decision === "accept" && response.status === "accepted") {
    return {
      ...state,
      acceptedOfferId: offerId,
      cards: state.cards.map((card) =>
        card.offerId === offerId ? card : { ...card, disabled: true },
      ),
      notice: null,
    };
  }
  // declined: drop the card, keep everything else live
  return {
    ...state,
    cards: state.cards.filter((card) => card.offerId !== offerId),
    notice: null,
  };
}

/** Surface the server's verdict from an expiry race without blocking. */
export function applyExpiredVerdict(state: InboxState, offerId: string): InboxState {
  return {
    ...state,
    cards: state.cards.filter((card) => card.offerId !== offerId),
    notice: "That offer expired before the decision reached the server.",
  };
}
