// Full-stack smoke: a real engine process serving a small synthetic index,
// driven through the same initApp entry the browser uses. Requires python3
// with the engine package installed (true in this repo's dev environment).
import { spawn } from "node:child_process";
import type { ChildProcessByStdio } from "node:child_process";
import type { Readable } from "node:stream";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import type { AppHandles } from "../src/app.js";
import { initApp } from "../src/app.js";
import { mountMarkup } from "./helpers.js";

const SERVER_SCRIPT = `
import tempfile
from dataclasses import replace
from pathlib import Path

from ragforge import synth
from ragforge.config import default_config
from ragforge.pipeline import pipeline_init
from ragforge.server import make_server

tmp = Path(tempfile.mkdtemp(prefix="ui-smoke-"))
corpus = tmp / "corpus.jsonl"
synth.write_corpus_jsonl(corpus, synth.make_corpus(6))
config = replace(
    default_config(),
    corpus_path=str(corpus),
    index_path=str(tmp / "index.rgf"),
)
server = make_server(pipeline_init(config), "127.0.0.1", 0)
print(server.server_address[1], flush=True)
server.serve_forever()
`;

let engine: ChildProcessByStdio<null, Readable, Readable>;
let app: AppHandles;

function startEngine(): Promise<number> {
  engine = spawn("python3", ["-u", "-c", SERVER_SCRIPT], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  engine.stderr.on("data", (chunk: Buffer) => {
    stderr += String(chunk);
  });
  return new Promise<number>((resolve, reject) => {
    let out = "";
    const onData = (chunk: Buffer) => {
      out += String(chunk);
      const newline = out.indexOf("\n");
      if (newline !== -1) {
        engine.stdout.off("data", onData);
        const port = Number.parseInt(out.slice(0, newline).trim(), 10);
        if (Number.isInteger(port) && port > 0) resolve(port);
        else reject(new Error(`engine printed a bogus port: ${out}`));
      }
    };
    engine.stdout.on("data", onData);
    engine.once("exit", (code) => {
      reject(new Error(`engine exited before binding (code ${code}): ${stderr}`));
    });
    setTimeout(() => {
      reject(new Error(`engine never reported a port; stderr so far: ${stderr}`));
    }, 45_000);
  });
}

function turns(): HTMLElement[] {
  return [...document.querySelectorAll<HTMLElement>("#transcript .turn")];
}

beforeAll(async () => {
  const port = await startEngine();
  // Point the test window at the engine origin so the page's relative
  // /query and /healthz URLs resolve exactly as they do when served at /ui.
  const testWindow = window as unknown as {
    happyDOM?: { setURL?: (url: string) => void };
  };
  let baseUrl = `http://127.0.0.1:${port}`;
  if (testWindow.happyDOM?.setURL) {
    testWindow.happyDOM.setURL(`http://127.0.0.1:${port}/ui/`);
    baseUrl = "";
  }
  mountMarkup();
  app = initApp(document, baseUrl);
});

afterAll(() => {
  if (engine && engine.exitCode === null) engine.kill("SIGKILL");
});

describe("chat UI against a live engine", () => {
  it("rag question renders an answer with at least one scored context", async () => {
    await app.submitQuestion("Which frequency does unit 002 operate at?");

    expect(turns()).toHaveLength(1);
    const turn = turns()[0] as HTMLElement;
    expect(turn.classList.contains("turn-failed")).toBe(false);
    const answer = turn.querySelector(".turn-answer")?.textContent ?? "";
    expect(answer.length).toBeGreaterThan(0);
    const scores = [...turn.querySelectorAll(".hit-score")];
    expect(scores.length).toBeGreaterThanOrEqual(1);
    for (const score of scores) {
      expect(score.textContent).toMatch(/^\d\.\d{3}$/);
    }
    expect(turn.querySelector(".mode-badge")?.textContent).toBe("rag");
  });

  it("vanilla mode answers without a context panel", async () => {
    (document.querySelector("#mode-toggle") as HTMLButtonElement).click();
    expect(app.store.mode).toBe("vanilla");

    await app.submitQuestion("And without retrieval?");

    expect(turns()).toHaveLength(2);
    const turn = turns()[1] as HTMLElement;
    expect(turn.classList.contains("turn-failed")).toBe(false);
    expect(turn.querySelector(".context-panel")).toBeNull();
    expect(turn.querySelector(".mode-badge")?.textContent).toBe("vanilla");
    expect((turn.querySelector(".turn-answer")?.textContent ?? "").length).toBeGreaterThan(0);
  });

  it("a killed engine yields an inline error and the transcript survives", async () => {
    engine.kill("SIGKILL");
    await new Promise<void>((resolve) => {
      if (engine.exitCode !== null) resolve();
      else engine.once("exit", () => resolve());
    });

    (document.querySelector("#mode-toggle") as HTMLButtonElement).click();
    expect(app.store.mode).toBe("rag");
    await app.submitQuestion("Is anyone still there?");

    const all = turns();
    expect(all).toHaveLength(3);
    const failed = all[2] as HTMLElement;
    expect(failed.classList.contains("turn-failed")).toBe(true);
    expect(failed.querySelector(".turn-error")?.textContent).toContain("unreachable");

    // Earlier turns are untouched: answer, contexts, badges all still there.
    const first = all[0] as HTMLElement;
    expect((first.querySelector(".turn-answer")?.textContent ?? "").length).toBeGreaterThan(0);
    expect(first.querySelectorAll(".hit-score").length).toBeGreaterThanOrEqual(1);
    expect(all[1]?.querySelector(".mode-badge")?.textContent).toBe("vanilla");

    // Input is re-enabled for a retry.
    expect((document.querySelector("#question-input") as HTMLInputElement).disabled).toBe(false);
  });
});
