import { ApiClient } from "./api.js";
import { NavigatorApp, NavigatorElements } from "./navigator.js";
import { readState } from "./state.js";

declare global {
  interface Window {
    LECTSEG_API?: string;
    navigatorApp?: NavigatorApp;
  }
}

function apiBase(): string {
  if (window.LECTSEG_API) {
    return window.LECTSEG_API;
  }
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8000";
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

export function bootstrap(): NavigatorApp {
  const elements: NavigatorElements = {
    player: byId<HTMLAudioElement>("player"),
    strip: byId("strip"),
    legend: byId("legend"),
    recordingList: byId("recordings"),
    status: byId("status"),
    nowPlaying: byId("now-playing"),
    prevButton: byId<HTMLButtonElement>("prev-segment"),
    nextButton: byId<HTMLButtonElement>("next-segment"),
  };
  const app = new NavigatorApp(new ApiClient(apiBase()), elements, window);
  document.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    app.handleKey(event.key);
  });
  void app.start(readState(window));
  window.navigatorApp = app;
  return app;
}

bootstrap();
