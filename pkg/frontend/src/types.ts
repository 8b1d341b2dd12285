export interface TimelineSegment {
  start_s: number;
  end_s: number;
  label: string;
  confidence: number;
}

export interface TimelineDoc {
  recording_id: string;
  model_fingerprint?: string;
  taxonomy: Record<string, string>; // label id (as string) -> name
  segments: TimelineSegment[];
}

export interface RecordingInfo {
  id: string;
  duration_s?: number | null;
  meta: Record<string, unknown>;
  has_timeline: boolean;
  has_media: boolean;
}

/** Inverted taxonomy: label name -> numeric id. */
export function labelIds(taxonomy: Record<string, string>): Map<string, number> {
  const out = new Map<string, number>();
  for (const [id, name] of Object.entries(taxonomy)) {
    out.set(name, Number(id));
  }
  return out;
}
