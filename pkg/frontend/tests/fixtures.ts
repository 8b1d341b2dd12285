import { RecordingInfo, TimelineDoc } from "../src/types.js";

export const TAXONOMY: Record<string, string> = {
  "0": "Theory/Concept",
  "1": "Exercise/Problem",
  "2": "Example/Real Application",
  "3": "Organization",
  "4": "Interaction",
  "5": "Digression",
  "6": "Other",
  "7": "Indistinct Chat",
  "8": "Pause",
  "9": "Miscellaneous",
};

export const FIXTURE_TIMELINE: TimelineDoc = {
  recording_id: "lec01",
  model_fingerprint: "lectseg-test",
  taxonomy: TAXONOMY,
  segments: [
    { start_s: 0, end_s: 120, label: "Theory/Concept", confidence: 0.91 },
    { start_s: 120, end_s: 300, label: "Exercise/Problem", confidence: 0.84 },
    { start_s: 300, end_s: 330, label: "Pause", confidence: 0.77 },
    { start_s: 330, end_s: 480, label: "Exercise/Problem", confidence: 0.8 },
    { start_s: 480, end_s: 600, label: "Interaction", confidence: 0.72 },
  ],
};

export const EMPTY_TIMELINE: TimelineDoc = {
  recording_id: "empty01",
  taxonomy: TAXONOMY,
  segments: [],
};

export const RECORDINGS: RecordingInfo[] = [
  { id: "lec01", duration_s: 600, meta: { course: "Electronics" }, has_timeline: true, has_media: true },
  { id: "empty01", duration_s: 0, meta: {}, has_timeline: true, has_media: false },
];

/** fetch stub serving the fixtures above; unknown ids get a 404. */
export function fakeFetch(): typeof fetch {
  return async (input: RequestInfo | URL): Promise<Response> => {
    const url = String(input);
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });
    if (url.endsWith("/api/taxonomy")) {
      return json(TAXONOMY);
    }
    if (url.endsWith("/api/recordings")) {
      return json(RECORDINGS);
    }
    if (url.endsWith("/api/recordings/lec01/timeline")) {
      return json(FIXTURE_TIMELINE);
    }
    if (url.endsWith("/api/recordings/empty01/timeline")) {
      return json(EMPTY_TIMELINE);
    }
    return json({ detail: "not found" }, 404);
  };
}
