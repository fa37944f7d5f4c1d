// DOM wiring: seat ring (left), event timeline (center), advice panel
// (right). All state transitions go through state.ts; all numbers shown in
// the advice panel come from render.ts verbatim extraction.

import { AdvisorClient, AdvisorError } from "./api.js";
import { renderAdvice } from "./render.js";
import {
  GameEvent,
  NUM_SEATS,
  SessionState,
  StorageLike,
  TEAM_SIZES,
  approvedByMajority,
  awaitingMissionResult,
  currentMission,
  exportSession,
  importSession,
  nextLeader,
  recordEvent,
  saveSession,
  toView,
  undo,
} from "./state.js";
import type { Vote } from "./types.js";

export class App {
  private state: SessionState;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: AdvisorClient,
    private readonly storage: StorageLike,
    initial: SessionState,
  ) {
    this.state = initial;
    this.render();
  }

  private setState(state: SessionState): void {
    this.state = state;
    saveSession(state, this.storage);
    this.render();
  }

  private error(message: string): void {
    const banner = this.root.querySelector("#error-banner") as HTMLElement;
    banner.textContent = message;
    banner.hidden = message === "";
  }

  /** Append an event, letting the server reject invalid ones inline. */
  private async tryRecord(event: GameEvent): Promise<void> {
    let candidate: SessionState;
    try {
      candidate = recordEvent(this.state, event);
    } catch (exc) {
      this.error(String((exc as Error).message));
      return;
    }
    try {
      const violations = await this.client.validate(toView(candidate));
      if (violations.length > 0) {
        const v = violations[0];
        this.error(`${v.rule} at ${v.location}: ${v.message}`);
        return;
      }
    } catch (exc) {
      this.error(`validation unavailable: ${(exc as Error).message}`);
      return;
    }
    this.error("");
    this.setState(candidate);
  }

  private async requestAdvice(): Promise<void> {
    try {
      const result = await this.client.advise(toView(this.state));
      this.setState({ ...this.state, lastAdvice: result.parsed });
      const panel = this.root.querySelector("#advice-panel") as HTMLElement;
      panel.innerHTML = renderAdvice(result, this.state.seatLabels);
      this.error("");
    } catch (exc) {
      const err = exc as AdvisorError;
      this.error(
        err.status === 0
          ? `advisor unreachable: ${err.message} — state preserved, retry when the service is up`
          : `advise failed (${err.status}): ${err.message}`,
      );
    }
  }

  private readProposalForm(): GameEvent {
    const team: number[] = [];
    const votes: Vote[] = [];
    for (let s = 0; s < NUM_SEATS; s++) {
      const onTeam = this.root.querySelector(`#team-${s}`) as HTMLInputElement;
      if (onTeam.checked) team.push(s);
      const approve = this.root.querySelector(`#vote-${s}`) as HTMLInputElement;
      votes.push(approve.checked ? "Approve" : "Reject");
    }
    return { kind: "proposal", team, votes };
  }

  private render(): void {
    const mission = currentMission(this.state.events);
    const awaiting = awaitingMissionResult(this.state.events);
    const leader = nextLeader(this.state.events);
    this.root.innerHTML = `
      <div id="error-banner" class="banner" hidden></div>
      <div class="columns">
        <section class="panel" id="seats-panel">
          <h2>Seats</h2>
          ${this.seatRingHtml()}
        </section>
        <section class="panel" id="timeline-panel">
          <h2>Timeline</h2>
          <ol id="timeline">${this.timelineHtml()}</ol>
          <button id="undo" ${this.state.events.length ? "" : "disabled"}>undo last</button>
          ${awaiting ? this.missionResultFormHtml() : ""}
          ${mission !== null && !awaiting ? this.proposalFormHtml(mission, leader) : ""}
          <div class="session-io">
            <button id="export">export session</button>
            <button id="import">import session</button>
            <textarea id="session-json" rows="4" placeholder="advice-request JSON"></textarea>
          </div>
        </section>
        <section class="panel">
          <h2>Advice</h2>
          <button id="advise" ${this.state.spySeats.length === 2 ? "" : "disabled"}>
            request advice</button>
          <div id="advice-panel"></div>
        </section>
      </div>`;
    this.bind();
  }

  private seatRingHtml(): string {
    const rows: string[] = [];
    for (let s = 0; s < NUM_SEATS; s++) {
      const spy = this.state.spySeats.includes(s);
      rows.push(
        `<div class="seat-row">
          <input id="label-${s}" value="${this.state.seatLabels[s]}" />
          <label><input type="checkbox" id="spy-${s}" ${spy ? "checked" : ""}/> spy</label>
        </div>`,
      );
    }
    return rows.join("");
  }

  private timelineHtml(): string {
    let mission = 0;
    return this.state.events
      .map((ev) => {
        if (ev.kind === "proposal") {
          const verdict = approvedByMajority(ev.votes) ? "approved" : "rejected";
          return `<li>m${mission + 1} proposal [${ev.team.join(", ")}] — ${verdict}</li>`;
        }
        mission += 1;
        const outcome = ev.failCount === 0 ? "succeeded" : `failed (${ev.failCount})`;
        return `<li>m${mission} ${outcome}</li>`;
      })
      .join("");
  }

  private proposalFormHtml(mission: number, leader: number): string {
    const seats = Array.from({ length: NUM_SEATS }, (_, s) => s);
    return `
      <fieldset id="proposal-form">
        <legend>Mission ${mission + 1} proposal — leader ${this.state.seatLabels[leader]},
          team of ${TEAM_SIZES[mission]}</legend>
        <div>team: ${seats
          .map((s) => `<label><input type="checkbox" id="team-${s}"/>${s}</label>`)
          .join(" ")}</div>
        <div>approve: ${seats
          .map((s) => `<label><input type="checkbox" id="vote-${s}" checked/>${s}</label>`)
          .join(" ")}</div>
        <button id="submit-proposal">record proposal</button>
      </fieldset>`;
  }

  private missionResultFormHtml(): string {
    return `
      <fieldset id="result-form">
        <legend>Mission result</legend>
        <label>fails: <select id="fail-count">
          <option>0</option><option>1</option><option>2</option><option>3</option>
        </select></label>
        <button id="submit-result">record result</button>
      </fieldset>`;
  }

  private bind(): void {
    for (let s = 0; s < NUM_SEATS; s++) {
      const label = this.root.querySelector(`#label-${s}`) as HTMLInputElement;
      label.addEventListener("change", () => {
        const seatLabels = [...this.state.seatLabels];
        seatLabels[s] = label.value;
        this.setState({ ...this.state, seatLabels });
      });
      const spy = this.root.querySelector(`#spy-${s}`) as HTMLInputElement;
      spy.addEventListener("change", () => {
        const spySeats = spy.checked
          ? [...this.state.spySeats, s]
          : this.state.spySeats.filter((x) => x !== s);
        this.setState({ ...this.state, spySeats, lastAdvice: null });
      });
    }
    this.root.querySelector("#undo")?.addEventListener("click", () => {
      this.error("");
      this.setState(undo(this.state));
    });
    this.root.querySelector("#submit-proposal")?.addEventListener("click", () => {
      void this.tryRecord(this.readProposalForm());
    });
    this.root.querySelector("#submit-result")?.addEventListener("click", () => {
      const select = this.root.querySelector("#fail-count") as HTMLSelectElement;
      void this.tryRecord({ kind: "mission_result", failCount: Number(select.value) });
    });
    this.root.querySelector("#advise")?.addEventListener("click", () => {
      void this.requestAdvice();
    });
    const textarea = this.root.querySelector("#session-json") as HTMLTextAreaElement;
    this.root.querySelector("#export")?.addEventListener("click", () => {
      textarea.value = exportSession(this.state);
    });
    this.root.querySelector("#import")?.addEventListener("click", () => {
      try {
        this.setState(importSession(textarea.value, this.state));
        this.error("");
      } catch (exc) {
        this.error(`import failed: ${(exc as Error).message}`);
      }
    });
  }
}
