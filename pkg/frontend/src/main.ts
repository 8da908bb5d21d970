/** Entry point: wires the store, renderer and controls to the page. */

import { GatewayClient } from "./api.js";
import { SceneRenderer } from "./render.js";
import { TrainerStore } from "./viewmodel.js";

const params = new URLSearchParams(window.location.search);
const gatewayUrl = params.get("gateway") ?? `http://${window.location.hostname}:8844`;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const stepText = document.getElementById("step-text") as HTMLDivElement;
const stepCounter = document.getElementById("step-counter") as HTMLSpanElement;
const connectionBadge = document.getElementById("connection") as HTMLSpanElement;
const noticeBox = document.getElementById("notice") as HTMLDivElement;
const nextButton = document.getElementById("next") as HTMLButtonElement;
const previousButton = document.getElementById("previous") as HTMLButtonElement;

const store = new TrainerStore(new GatewayClient(gatewayUrl));
const renderer = new SceneRenderer(canvas, store);

let noticeTimer: number | undefined;

function refreshControls(): void {
  nextButton.disabled = store.busy;
  previousButton.disabled = store.busy;
  stepText.textContent = store.stepText ?? "Press Next to begin.";
  stepCounter.textContent = `step ${store.stepCursor} / ${store.steps.length}`;
  connectionBadge.textContent = store.connection;
  connectionBadge.className = store.connection;
  if (store.notice) {
    noticeBox.textContent = store.notice;
    noticeBox.style.display = "block";
    window.clearTimeout(noticeTimer);
    noticeTimer = window.setTimeout(() => {
      store.clearNotice();
    }, 2500);
  } else {
    noticeBox.style.display = "none";
  }
}

store.onChange(refreshControls);
nextButton.addEventListener("click", () => void store.next());
previousButton.addEventListener("click", () => void store.previous());

function frame(now: number): void {
  renderer.draw(now);
  requestAnimationFrame(frame);
}

void (async () => {
  try {
    await store.bootstrap();
    refreshControls();
    requestAnimationFrame(frame);
    void store.subscribeEvents();
  } catch (error) {
    noticeBox.textContent = `Cannot reach the gateway at ${gatewayUrl}: ${String(error)}`;
    noticeBox.style.display = "block";
  }
})();
