// DOM shell: polling, rendering, event wiring. All decision/display
// logic lives in the view-model modules; this file only paints them.

import { ApiClient, ApiError } from "./api.js";
import {
  complaintsView,
  earningsView,
  pollView,
  profileFields,
  ratingsView,
} from "./dashboards.js";
import {
  InboxState,
  applyDecision,
  applyExpiredVerdict,
  inboxFromResponse,
  tickCountdowns,
} from "./offers.js";

const POLL_INTERVAL_MS = 2000;
const COUNTDOWN_INTERVAL_MS = 1000;

interface AppConfig {
  baseUrl: string;
  token: string;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class ConsoleApp {
  private client: ApiClient;
  private driverId: string;
  private inbox: InboxState = {
    bundleId: null,
    atMostOneAccept: true,
    cards: [],
    acceptedOfferId: null,
    notice: null,
  };
  private stale = false;

  constructor(config: AppConfig) {
    this.client = new ApiClient(config.baseUrl, config.token);
    this.driverId = this.client.driverId();
  }

  start(): void {
    void this.refreshOffers();
    void this.refreshDashboards();
    setInterval(() => void this.refreshOffers(), POLL_INTERVAL_MS);
    setInterval(() => {
      this.inbox = tickCountdowns(this.inbox, Date.now());
      this.renderInbox();
    }, COUNTDOWN_INTERVAL_MS);
    el("offers").addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const offerId = target.dataset.offer;
      const decision = target.dataset.decision as "accept" | "decline" | undefined;
      if (offerId && decision) void this.decide(offerId, decision);
    });
  }

  private async refreshOffers(): Promise<void> {
    try {
      const response = await this.client.getOffers(this.driverId);
      const accepted = this.inbox.acceptedOfferId;
      this.inbox = inboxFromResponse(response, Date.now());
      this.inbox.acceptedOfferId = accepted;
      this.stale = false;
    } catch {
      this.stale = true; // keep the last known cards, visibly stale
    }
    this.renderInbox();
  }

  private async decide(offerId: string, decision: "accept" | "decline"): Promise<void> {
    try {
      const response = await this.client.postDecision(offerId, decision);
      this.inbox = applyDecision(this.inbox, offerId, decision, response);
      if (decision === "accept" && response.trip) {
        el("trip-panel").innerHTML = `<h3>Trip assigned</h3>
          <p>Request ${escapeHtml(response.trip.request_id)} — pickup in
          ${Math.round(response.trip.pickup_eta_minutes)} min, about
          ${Math.round(response.trip.duration_minutes)} min of driving.</p>`;
        void this.refreshDashboards();
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 410) {
        this.inbox = applyExpiredVerdict(this.inbox, offerId);
      } else if (error instanceof ApiError && error.status === 409) {
        this.inbox = { ...this.inbox, notice: "That offer was already settled." };
      } else {
        this.stale = true;
      }
    }
    this.renderInbox();
  }

  private renderInbox(): void {
    const parts: string[] = [];
    if (this.stale) parts.push(`<p class="stale">Connection hiccup — showing last known offers.</p>`);
    if (this.inbox.notice) parts.push(`<p class="notice">${escapeHtml(this.inbox.notice)}</p>`);
    if (this.inbox.cards.length === 0) parts.push(`<p class="empty">No live offers right now.</p>`);
    for (const card of this.inbox.cards) {
      const banner = card.violatedBanner
        ? `<p class="banner">${escapeHtml(card.violatedBanner)}</p>`
        : "";
      const incentive = card.incentiveText
        ? `<p class="incentive">Incentive: ${card.incentiveText}</p>`
        : "";
      const disabled = card.disabled ? "disabled" : "";
      parts.push(`<article class="card ${card.disabled ? "muted" : ""}">
        ${banner}
        <h3>${escapeHtml(card.destination)} — ${card.fareText}</h3>
        <p>Chance you'd take it: <strong>${card.probabilityText}</strong></p>
        <ul>${card.factorLines.map((line) => `<li>${escapeHtml(line)}</li>`).join("")}</ul>
        ${incentive}
        <p>Pickup ${card.etaText} away · trip ${card.durationText} · ${card.extraInfo.join(" · ")}</p>
        <p class="countdown">Expires in ${card.countdownText}</p>
        <button data-offer="${card.offerId}" data-decision="accept" ${disabled}>Accept</button>
        <button data-offer="${card.offerId}" data-decision="decline" ${disabled}>Decline</button>
      </article>`);
    }
    el("offers").innerHTML = parts.join("\n");
  }

  private async refreshDashboards(): Promise<void> {
    try {
      const [profile, earnings, ratings, complaints, topics, polls] = await Promise.all([
        this.client.getProfile(this.driverId),
        this.client.getEarnings(this.driverId),
        this.client.getRatings(this.driverId),
        this.client.getComplaints(this.driverId),
        this.client.getTopics(),
        this.client.getPolls(),
      ]);

      const fields = profileFields(profile, Date.now());
      el("profile").innerHTML = `<h2>Profile</h2><table>${fields
        .map(
          (f) => `<tr>
            <td>${escapeHtml(f.field)}</td>
            <td>${escapeHtml(f.value)}</td>
            <td>${f.editable ? "editable" : `🔒 ${escapeHtml(f.lockNote ?? "")}`}</td>
          </tr>`,
        )
        .join("")}</table>`;

      const earningsVm = earningsView(earnings);
      el("earnings").innerHTML = `<h2>Earnings</h2>
        <p>Today ${earningsVm.todayText} · this week ${earningsVm.weekText}
        ${earningsVm.goal ? `· goal ${earningsVm.goal.label} [${earningsVm.goal.state}]` : ""}</p>
        <table><tr><th>trip</th><th>fare</th><th>incentive</th><th>tip</th>
        <th>fuel</th><th>maintenance</th><th>fixed</th><th>TCO</th><th>net</th></tr>
        ${earningsVm.rows
          .map(
            (r) => `<tr><td>${escapeHtml(r.tripId)}</td><td>${r.fare}</td><td>${r.incentive}</td>
            <td>${r.tip}</td><td>${r.fuel}</td><td>${r.maintenance}</td><td>${r.fixed}</td>
            <td>${r.tco}</td><td><strong>${r.net}</strong></td></tr>`,
          )
          .join("")}</table>`;

      const ratingsVm = ratingsView(ratings);
      el("ratings").innerHTML = `<h2>Ratings</h2><table>${ratingsVm.factors
        .map(
          (f) => `<tr><td>${escapeHtml(f.factor)}</td><td>${f.meanText} (${f.count})</td>
          <td>${f.alert ? "⚠ continually low" : ""}</td>
          <td>${f.disputeEnabled ? `<button data-dispute="${escapeHtml(f.factor)}">dispute</button>` : ""}</td></tr>`,
        )
        .join("")}</table>`;

      el("complaints").innerHTML = `<h2>Complaints</h2>${complaintsView(complaints)
        .map(
          (t) => `<p>${escapeHtml(t.ticketId)} [${escapeHtml(t.category)}] —
          <strong>${escapeHtml(t.status)}</strong>, expected completion ${escapeHtml(t.expectedCompletion)}</p>`,
        )
        .join("")}`;

      el("forum").innerHTML = `<h2>Forum</h2>
        <ul>${topics.topics.map((t) => `<li>${escapeHtml(t.title)}${t.location_tag ? ` (${escapeHtml(t.location_tag)})` : ""}</li>`).join("")}</ul>
        ${polls.polls
          .map((p) => {
            const vm = pollView(p);
            return `<div class="poll"><p>${escapeHtml(vm.question)} ${vm.open ? "" : "(closed)"}</p>
            <ul>${vm.options.map((o) => `<li>${escapeHtml(o.option)}: ${o.votes}</li>`).join("")}</ul></div>`;
          })
          .join("")}`;
    } catch {
      // dashboards refresh on the next action; offers carry the stale flag
    }
  }
}

declare global {
  interface Window {
    FAIRRIDE_BASE_URL?: string;
    FAIRRIDE_TOKEN?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("offers")) {
  const app = new ConsoleApp({
    baseUrl: window.FAIRRIDE_BASE_URL ?? "http://127.0.0.1:8000",
    token: window.FAIRRIDE_TOKEN ?? "driver-d1",
  });
  app.start();
}
