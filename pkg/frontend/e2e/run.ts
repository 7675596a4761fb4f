/** End-to-end console check against a live toy-model service.
 *
 * Spawns the Python session service with freshly written toy models, then
 * drives the console's own modules (API client, state fold, player)
 * through the acceptance flow: three sentences including one override ->
 * three cards with correct badges, the reseeded flag shown exactly once,
 * and playback bytes identical to the bytes the server sent.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ComposerClient, decodeBase64 } from "../src/api.js";
import { emotionLabel } from "../src/emotion.js";
import { parseMidi } from "../src/midi.js";
import { ExcerptPlayer, type AudioLike } from "../src/player.js";
import { initialView, reduce, timeline, type SessionView } from "../src/state.js";

const PORT = 8765;
const BASE = `http://127.0.0.1:${PORT}`;
const HERE = dirname(fileURLToPath(import.meta.url));

function fail(message: string): never {
  console.log(`criterion 12: FAIL — ${message}`);
  process.exit(1);
}

function assert(condition: boolean, message: string): void {
  if (!condition) fail(message);
}

function fakeAudio(): AudioLike {
  const param = () => ({
    value: 0,
    setValueAtTime: () => undefined,
    linearRampToValueAtTime: () => undefined,
  });
  return {
    currentTime: 0,
    destination: {} as AudioNode,
    createOscillator: () =>
      ({
        type: "sine",
        frequency: param(),
        connect: () => undefined,
        disconnect: () => undefined,
        start: () => undefined,
        stop: () => undefined,
      }) as unknown as OscillatorNode,
    createGain: () =>
      ({ gain: param(), connect: () => undefined, disconnect: () => undefined }) as unknown as GainNode,
  };
}

async function waitForService(client: ComposerClient, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await client.health();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  fail("service did not become healthy in time");
}

async function main(): Promise<void> {
  const modelDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  // compiled layout puts this file under dist/e2e; the python helper stays in e2e/
  const build = spawnSync("python3", [join(HERE, "..", "..", "e2e", "make_models.py"), modelDir], {
    stdio: "inherit",
  });
  if (build.status !== 0) fail("could not write toy models");

  let server: ChildProcess | null = null;
  try {
    server = spawn(
      "python3",
      [
        "-m", "storycomposer.cli", "serve",
        "--host", "127.0.0.1", "--port", String(PORT),
        "--lm", join(modelDir, "lm.model"),
        "--valence-scorer", join(modelDir, "scorer.valence"),
        "--arousal-scorer", join(modelDir, "scorer.arousal"),
        "--story-model", join(modelDir, "story.model"),
        "--library", join(modelDir, "library.model"),
        "--beam-size", "2", "--expansion-k", "4", "--sentence-seconds", "1.0",
        "--fixed-seed", "7",
      ],
      { stdio: ["ignore", "inherit", "inherit"] },
    );

    const client = new ComposerClient(BASE);
    await waitForService(client);

    // --- the console flow, using the page's own state fold ----------------
    let view: SessionView = reduce(initialView, { kind: "connect-started" });
    const sessionId = await client.createSession();
    view = reduce(view, { kind: "session-created", sessionId });

    const steps: { text: string; override?: { v: 0 | 1; a: 0 | 1 } }[] = [
      { text: "the battle begins now" }, // classifier: Agitated (0,1)
      { text: "the battle begins now", override: { v: 1, a: 1 } }, // forced Happy -> reseed
      { text: "a joyful feast for everyone" }, // classifier: Happy, same corner
    ];
    for (const step of steps) {
      view = reduce(view, { kind: "submit-started" });
      const response = await client.submitSentence(sessionId, step.text, {
        override: step.override,
      });
      view = reduce(view, {
        kind: "sentence-accepted",
        text: step.text,
        overridden: step.override !== undefined,
        response,
      });
    }

    // --- assertions: cards, badges, reseed, playback bytes ----------------
    assert(view.cards.length === 3, `expected 3 cards, got ${view.cards.length}`);
    const badges = view.cards.map((c) => emotionLabel(c.quadrant));
    assert(
      badges.join(",") === "Agitated,Happy,Happy",
      `badges wrong: ${badges.join(",")}`,
    );
    assert(view.cards[1]!.overridden, "override card not marked overridden");
    const reseeds = view.cards.filter((c) => c.reseeded).length;
    assert(reseeds === 1, `reseeded flag shown ${reseeds} times, expected once`);
    assert(view.cards[1]!.reseeded, "reseed not on the override card");
    assert(
      timeline(view).length === 3,
      "timeline must have one point per excerpt",
    );

    const player = new ExcerptPlayer(fakeAudio());
    for (const card of view.cards) {
      const serverBytes = decodeBase64(card.midiB64);
      player.load(serverBytes);
      player.play().stop();
      const played = player.bytes;
      assert(played !== null && Buffer.compare(played, serverBytes) === 0,
        "playback bytes differ from server bytes");
      assert(parseMidi(serverBytes).length > 0, "excerpt decoded to no notes");
    }

    const piece = await client.getPiece(sessionId);
    assert(
      String.fromCharCode(...piece.subarray(0, 4)) === "MThd",
      "exported piece is not MIDI",
    );
    assert(parseMidi(piece).length > 0, "exported piece has no notes");

    const summary = await client.getSummary(sessionId);
    assert(summary.sentences.length === 3, "server summary disagrees with card count");

    console.log(
      "criterion 12: PASS — 3 sentences incl. one override -> 3 cards, " +
        "correct badges, one reseed, playback bytes equal server bytes",
    );
  } finally {
    server?.kill();
    rmSync(modelDir, { recursive: true, force: true });
  }
}

main().catch((error: unknown) => fail(String(error)));
