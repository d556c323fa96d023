import { ApiClient } from "./api.js";
import { ReviewController } from "./controller.js";
import { render } from "./dom.js";
import { createPoller } from "./poller.js";

const POLL_INTERVAL_MS = 10_000;

function serviceBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "http://127.0.0.1:8571";
}

export function boot(root: HTMLElement): void {
  const controller = new ReviewController(new ApiClient(serviceBase()));
  controller.onRender((view) => render(root, view, controller));
  const poller = createPoller(() => controller.refresh(), POLL_INTERVAL_MS);
  poller.start();
}

const rootElement = document.getElementById("app");
if (rootElement) boot(rootElement);
