/** DOM rendering: the page is re-rendered from the SessionView on every
 * state change. No musical content is ever derived client-side — badges,
 * durations, and flags all come from server responses. */

import { decodeBase64 } from "./api.js";
import { emotionLabel, QUADRANTS, sameQuadrant, type Quadrant } from "./emotion.js";
import { downloadUrl } from "./player.js";
import { timeline, type SessionView } from "./state.js";

export interface UiCallbacks {
  onSubmit(text: string, durationSeconds: number | undefined, override: Quadrant | null): void;
  onOverridePick(quadrant: Quadrant | null): void;
  onPlay(index: number): void;
  onStop(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderPicker(view: SessionView, callbacks: UiCallbacks): HTMLElement {
  const grid = el("div", "quadrant-picker");
  grid.title = "Override the detected emotion for the next sentence";
  // rows top-to-bottom: high arousal first, so the grid reads like the
  // valence/arousal square
  for (const a of [1, 0] as const) {
    for (const v of [0, 1] as const) {
      const quadrant: Quadrant = { v, a };
      const button = el("button", "quadrant", emotionLabel(quadrant));
      if (sameQuadrant(view.overridePick, quadrant)) button.classList.add("selected");
      button.addEventListener("click", () => {
        const next = sameQuadrant(view.overridePick, quadrant) ? null : quadrant;
        callbacks.onOverridePick(next);
      });
      grid.appendChild(button);
    }
  }
  return grid;
}

function renderCard(
  view: SessionView,
  index: number,
  callbacks: UiCallbacks,
): HTMLElement {
  const card = view.cards[index]!;
  const node = el("article", "card");
  const badge = el(
    "span",
    `badge q${card.quadrant.v}${card.quadrant.a}`,
    `${card.label} (v=${card.quadrant.v}, a=${card.quadrant.a})`,
  );
  if (card.overridden) badge.classList.add("overridden");
  node.appendChild(badge);
  if (card.reseeded) node.appendChild(el("span", "flag", "reseeded"));
  if (card.short) node.appendChild(el("span", "flag short", "short"));
  node.appendChild(el("p", "text", card.text));
  node.appendChild(el("span", "seconds", `${card.seconds.toFixed(2)} s`));

  if (card.midiB64) {
    const playing = view.playingIndex === index;
    const play = el("button", "play", playing ? "Stop" : "Play");
    play.addEventListener("click", () => (playing ? callbacks.onStop() : callbacks.onPlay(index)));
    node.appendChild(play);
    const download = el("a", "download", "download .mid");
    download.href = downloadUrl(decodeBase64(card.midiB64));
    download.setAttribute("download", `excerpt-${index + 1}.mid`);
    node.appendChild(download);
  }
  return node;
}

function renderTimeline(view: SessionView): HTMLElement {
  const strip = el("div", "timeline");
  timeline(view).forEach((point, i) => {
    const dot = el("span", `point q${point.v}${point.a}`, emotionLabel(point)[0]);
    dot.title = `${i + 1}: ${emotionLabel(point)}`;
    if (view.playingIndex === i) dot.classList.add("playing");
    strip.appendChild(dot);
  });
  return strip;
}

export function render(root: HTMLElement, view: SessionView, callbacks: UiCallbacks): void {
  root.replaceChildren();

  const status = el("div", `status ${view.connection}`, `service: ${view.connection}`);
  root.appendChild(status);
  if (view.error) root.appendChild(el("div", "error", view.error));

  const form = el("form", "sentence-form");
  const input = el("input") as HTMLInputElement;
  input.placeholder = "Narrate the next sentence…";
  input.disabled = view.pending || view.connection !== "connected";
  const duration = el("input") as HTMLInputElement;
  duration.type = "number";
  duration.step = "0.5";
  duration.min = "0.5";
  duration.placeholder = "seconds (optional)";
  const submit = el("button", "submit", view.pending ? "Composing…" : "Compose") as HTMLButtonElement;
  submit.type = "submit";
  submit.disabled = view.pending || view.connection !== "connected";
  form.append(input, duration, submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!input.value.trim()) return; // client-side validation: no request
    const seconds = duration.value ? Number(duration.value) : undefined;
    callbacks.onSubmit(input.value, seconds, view.overridePick);
    input.value = "";
  });
  root.appendChild(form);
  root.appendChild(renderPicker(view, callbacks));
  root.appendChild(renderTimeline(view));

  const list = el("section", "cards");
  view.cards.forEach((_, i) => list.appendChild(renderCard(view, i, callbacks)));
  root.appendChild(list);
}
