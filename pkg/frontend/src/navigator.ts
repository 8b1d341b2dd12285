import { ApiClient, ApiError } from "./api.js";
import { labelColor } from "./palette.js";
import { ViewState, writeState } from "./state.js";
import { TimelineStrip } from "./timeline.js";
import { TimelineDoc, TimelineSegment, labelIds } from "./types.js";

export interface NavigatorElements {
  player: HTMLMediaElement;
  strip: HTMLElement;
  legend: HTMLElement;
  recordingList: HTMLElement;
  status: HTMLElement;
  nowPlaying: HTMLElement;
  prevButton: HTMLButtonElement;
  nextButton: HTMLButtonElement;
}

/** Wires the API client, media element, timeline strip, label filter and
 *  URL state together. One instance per page. */
export class NavigatorApp {
  readonly strip: TimelineStrip;
  private taxonomy: Record<string, string> = {};
  private doc: TimelineDoc | null = null;
  private filter = new Set<number>();
  private recordingId: string | null = null;

  constructor(
    private api: ApiClient,
    private el: NavigatorElements,
    private win: Pick<Window, "history" | "location"> = window,
  ) {
    this.strip = new TimelineStrip(el.strip, { onSeek: (s) => this.jumpTo(s) });
    el.player.addEventListener("timeupdate", () => this.syncPlayhead());
    el.prevButton.addEventListener("click", () => this.step(-1));
    el.nextButton.addEventListener("click", () => this.step(1));
  }

  async start(state: ViewState): Promise<void> {
    this.taxonomy = await this.api.taxonomy();
    this.filter = new Set(state.filter);
    this.renderLegend();
    await this.renderRecordingList();
    if (state.recordingId) {
      await this.loadRecording(state.recordingId);
    }
  }

  /** Fetch taxonomy + timeline + media URL and render player and strip. */
  async loadRecording(recordingId: string): Promise<void> {
    this.setStatus("");
    try {
      this.doc = await this.api.timeline(recordingId);
    } catch (err) {
      this.doc = null;
      this.recordingId = null;
      this.el.player.removeAttribute("src");
      this.strip.render({ recording_id: "", taxonomy: this.taxonomy, segments: [] });
      const detail = err instanceof ApiError && err.status === 404
        ? `no timeline for "${recordingId}"`
        : `failed to load "${recordingId}"`;
      this.setStatus(detail, "error");
      return;
    }
    this.recordingId = recordingId;
    this.el.player.src = this.api.mediaUrl(recordingId);
    this.strip.render(this.doc);
    this.strip.setFilter(this.filter);
    if (this.doc.segments.length === 0) {
      this.setStatus("this recording has an empty timeline", "notice");
    }
    this.syncPlayhead();
    this.pushUrl();
  }

  /** Seek playback to the segment start; the strip highlight follows. */
  jumpTo(segment: TimelineSegment): void {
    this.el.player.currentTime = segment.start_s;
    try {
      const maybePlay = this.el.player.play?.();
      if (maybePlay && typeof maybePlay.catch === "function") {
        maybePlay.catch(() => {});
      }
    } catch {
      // environments without media playback (jsdom) throw synchronously
    }
    this.syncPlayhead();
  }

  setFilter(filter: Set<number>): void {
    this.filter = new Set(filter);
    this.strip.setFilter(this.filter);
    this.renderLegend();
    this.pushUrl();
  }

  toggleLabel(labelId: number): void {
    const next = new Set(this.filter);
    if (next.has(labelId)) {
      next.delete(labelId);
    } else {
      next.add(labelId);
    }
    this.setFilter(next);
  }

  get state(): ViewState {
    return { recordingId: this.recordingId, filter: new Set(this.filter) };
  }

  /** Jump to the next (+1) or previous (-1) segment passing the filter,
   *  wrapping at either end. */
  step(direction: 1 | -1): void {
    const matching = this.strip.matchingIndices();
    if (matching.length === 0) {
      return;
    }
    const current = this.strip.segmentIndexAt(this.el.player.currentTime);
    let target: number | undefined;
    if (direction > 0) {
      target = matching.find((i) => i > current);
      target ??= matching[0]; // wrap to first
    } else {
      target = [...matching].reverse().find((i) => i < current);
      target ??= matching[matching.length - 1]; // wrap to last
    }
    this.jumpTo(this.strip.segmentAt(target));
  }

  handleKey(key: string): void {
    if (key === "n") {
      this.step(1);
    } else if (key === "p") {
      this.step(-1);
    }
  }

  private syncPlayhead(): void {
    const t = this.el.player.currentTime;
    this.strip.setPlayhead(t);
    if (this.doc) {
      const index = this.strip.segmentIndexAt(t);
      const segment = index >= 0 ? this.doc.segments[index] : null;
      this.el.nowPlaying.textContent = segment ? segment.label : "";
    }
  }

  private renderLegend(): void {
    this.el.legend.replaceChildren();
    for (const [name, id] of labelIds(this.taxonomy)) {
      const chip = document.createElement("button");
      chip.className = "legend-chip";
      chip.dataset.labelId = String(id);
      chip.classList.toggle("active", this.filter.has(id));
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = labelColor(id);
      chip.append(swatch, document.createTextNode(name));
      chip.addEventListener("click", () => this.toggleLabel(id));
      this.el.legend.appendChild(chip);
    }
  }

  private async renderRecordingList(): Promise<void> {
    let recordings;
    try {
      recordings = await this.api.recordings();
    } catch {
      this.setStatus("service unreachable", "error");
      return;
    }
    this.el.recordingList.replaceChildren();
    for (const rec of recordings) {
      const item = document.createElement("button");
      item.className = "recording-item";
      item.dataset.recordingId = rec.id;
      const course = typeof rec.meta?.course === "string" ? ` - ${rec.meta.course}` : "";
      item.textContent = `${rec.id}${course}`;
      item.addEventListener("click", () => void this.loadRecording(rec.id));
      this.el.recordingList.appendChild(item);
    }
  }

  private setStatus(message: string, kind: "error" | "notice" | "" = ""): void {
    this.el.status.textContent = message;
    this.el.status.className = kind ? `status ${kind}` : "status";
    this.el.status.hidden = message === "";
  }

  private pushUrl(): void {
    writeState(this.win, this.state);
  }
}
