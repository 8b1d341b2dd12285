import { RecordingInfo, TimelineDoc } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

/** Thin typed client for the timeline service. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      throw new ApiError(resp.status, `${path} -> HTTP ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  recordings(): Promise<RecordingInfo[]> {
    return this.getJson("/api/recordings");
  }

  timeline(recordingId: string): Promise<TimelineDoc> {
    return this.getJson(`/api/recordings/${encodeURIComponent(recordingId)}/timeline`);
  }

  taxonomy(): Promise<Record<string, string>> {
    return this.getJson("/api/taxonomy");
  }

  mediaUrl(recordingId: string): string {
    return `${this.baseUrl}/api/recordings/${encodeURIComponent(recordingId)}/media`;
  }
}
