/** View state lives in the URL query string so deep links reconstruct it:
 *  ?rec=<recording id>&filter=<comma-separated label ids>
 */

export interface ViewState {
  recordingId: string | null;
  filter: Set<number>;
}

export function parseState(search: string): ViewState {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const filter = new Set<number>();
  const raw = params.get("filter");
  if (raw) {
    for (const part of raw.split(",")) {
      const id = Number(part);
      if (Number.isInteger(id) && id >= 0) {
        filter.add(id);
      }
    }
  }
  return { recordingId: params.get("rec"), filter };
}

export function serializeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.recordingId) {
    params.set("rec", state.recordingId);
  }
  if (state.filter.size > 0) {
    params.set("filter", [...state.filter].sort((a, b) => a - b).join(","));
  }
  const qs = params.toString();
  return qs ? `?${qs}` : "";
}

export function readState(win: Pick<Window, "location">): ViewState {
  return parseState(win.location.search);
}

export function writeState(win: Pick<Window, "history" | "location">, state: ViewState): void {
  const qs = serializeState(state);
  const url = `${win.location.pathname}${qs}`;
  win.history.replaceState(null, "", url);
}
