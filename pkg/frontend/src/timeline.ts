import { labelColor } from "./palette.js";
import { TimelineDoc, TimelineSegment, labelIds } from "./types.js";

export interface StripOptions {
  onSeek: (segment: TimelineSegment) => void;
}

/** The color-coded strip: one block per segment, widths proportional to
 *  duration, a playhead marker that filters can never hide. */
export class TimelineStrip {
  private root: HTMLElement;
  private track: HTMLDivElement;
  private marker: HTMLDivElement;
  private blocks: HTMLDivElement[] = [];
  private segments: TimelineSegment[] = [];
  private ids = new Map<string, number>();
  private total = 0;
  private filter: Set<number> = new Set();

  constructor(root: HTMLElement, private options: StripOptions) {
    this.root = root;
    this.track = document.createElement("div");
    this.track.className = "strip-track";
    this.marker = document.createElement("div");
    this.marker.className = "strip-playhead";
    this.root.replaceChildren(this.track, this.marker);
  }

  render(doc: TimelineDoc): void {
    this.segments = doc.segments;
    this.ids = labelIds(doc.taxonomy);
    this.total = doc.segments.length ? doc.segments[doc.segments.length - 1].end_s : 0;
    this.blocks = [];
    this.track.replaceChildren();
    for (const segment of doc.segments) {
      const block = document.createElement("div");
      block.className = "segment-block";
      const width = this.total > 0 ? (100 * (segment.end_s - segment.start_s)) / this.total : 0;
      block.style.width = `${width}%`;
      const labelId = this.ids.get(segment.label) ?? 0;
      block.style.backgroundColor = labelColor(labelId);
      block.dataset.labelId = String(labelId);
      block.dataset.start = String(segment.start_s);
      block.title = `${segment.label}  ${formatTime(segment.start_s)} - ${formatTime(segment.end_s)}  (${Math.round(segment.confidence * 100)}%)`;
      block.addEventListener("click", () => this.options.onSeek(segment));
      this.track.appendChild(block);
      this.blocks.push(block);
    }
    this.applyFilter();
  }

  /** Dim blocks whose label id is not in the filter; empty filter shows all. */
  setFilter(filter: Set<number>): void {
    this.filter = filter;
    this.applyFilter();
  }

  private applyFilter(): void {
    for (const block of this.blocks) {
      const labelId = Number(block.dataset.labelId);
      block.classList.toggle("dimmed", this.filter.size > 0 && !this.filter.has(labelId));
    }
  }

  /** Move the playhead marker and highlight the segment containing `t`. */
  setPlayhead(t: number): void {
    if (this.total > 0) {
      const clamped = Math.min(Math.max(t, 0), this.total);
      this.marker.style.left = `${(100 * clamped) / this.total}%`;
    }
    const index = this.segmentIndexAt(t);
    this.blocks.forEach((block, i) => block.classList.toggle("current", i === index));
  }

  segmentIndexAt(t: number): number {
    for (let i = 0; i < this.segments.length; i++) {
      const last = i === this.segments.length - 1;
      if (t >= this.segments[i].start_s && (t < this.segments[i].end_s || last)) {
        return i;
      }
    }
    return -1;
  }

  /** Indices of segments passing the filter, in timeline order. */
  matchingIndices(): number[] {
    const out: number[] = [];
    this.segments.forEach((segment, i) => {
      const labelId = this.ids.get(segment.label) ?? 0;
      if (this.filter.size === 0 || this.filter.has(labelId)) {
        out.push(i);
      }
    });
    return out;
  }

  segmentAt(index: number): TimelineSegment {
    return this.segments[index];
  }

  get segmentCount(): number {
    return this.segments.length;
  }
}

export function formatTime(seconds: number): string {
  const s = Math.floor(seconds % 60);
  const m = Math.floor((seconds / 60) % 60);
  const h = Math.floor(seconds / 3600);
  const mm = String(m).padStart(2, "0");
  const ss = String(s).padStart(2, "0");
  return h > 0 ? `${h}:${mm}:${ss}` : `${m}:${ss}`;
}
