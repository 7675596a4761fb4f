/** Page entry point: wires the API client, the state fold, the WebAudio
 * player, and the renderer together. */

import { ComposerClient, decodeBase64, ServiceError } from "./api.js";
import { ExcerptPlayer } from "./player.js";
import { initialView, reduce, type Action, type SessionView } from "./state.js";
import { render } from "./ui.js";

const SERVICE_URL = new URLSearchParams(location.search).get("service") ?? "";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const client = new ComposerClient(SERVICE_URL);
const player = new ExcerptPlayer(new AudioContext());

let view: SessionView = initialView;

function dispatch(action: Action): void {
  view = reduce(view, action);
  render(root!, view, callbacks);
}

const callbacks = {
  onSubmit(text: string, durationSeconds: number | undefined, override: typeof view.overridePick) {
    if (!view.sessionId || view.pending) return;
    const overridden = override !== null;
    dispatch({ kind: "submit-started" });
    client
      .submitSentence(view.sessionId, text, {
        durationSeconds,
        override: override ?? undefined,
      })
      .then((response) => dispatch({ kind: "sentence-accepted", text, overridden, response }))
      .catch((error: unknown) => {
        const message =
          error instanceof ServiceError ? `${error.detail.code}: ${error.detail.message}` : String(error);
        dispatch({ kind: "submit-failed", message });
      });
  },
  onOverridePick(quadrant: typeof view.overridePick) {
    dispatch({ kind: "override-picked", quadrant });
  },
  onPlay(index: number) {
    const card = view.cards[index];
    if (!card?.midiB64) return;
    player.load(decodeBase64(card.midiB64));
    player.play(() => dispatch({ kind: "play-stopped" }));
    dispatch({ kind: "play-started", index });
  },
  onStop() {
    player.stop();
    dispatch({ kind: "play-stopped" });
  },
};

dispatch({ kind: "connect-started" });
client
  .createSession()
  .then((sessionId) => dispatch({ kind: "session-created", sessionId }))
  .catch((error: unknown) => dispatch({ kind: "connect-failed", message: String(error) }));
