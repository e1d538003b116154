// End-to-end: the real studio DOM (jsdom standing in for the browser)
// against a live wisardlab service spawned as a subprocess. Every number
// asserted here came over real HTTP.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { StudioApi } from "../src/api";
import { Studio } from "../src/studio";

let server: ChildProcess;
let base: string;
let modelsDir: string;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForService(url: string): Promise<void> {
  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/models`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  modelsDir = mkdtempSync(join(tmpdir(), "wisardlab-e2e-"));
  server = spawn(
    "wisardlab",
    ["serve", "--port", String(port), "--models-dir", modelsDir],
    { stdio: "ignore" },
  );
  await waitForService(base);
});

afterAll(() => {
  server?.kill("SIGINT");
  rmSync(modelsDir, { recursive: true, force: true });
});

function mountStudio(): Studio {
  document.body.innerHTML = `<div id="app"></div>`;
  const root = document.getElementById("app")!;
  return new Studio(root, new StudioApi(base));
}

function drawGlyph(studio: Studio, pixels: number[]): void {
  // paint through real mouse events, like a person dragging
  const [first, ...rest] = pixels;
  studio.grid.cellAt(first).dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
  for (const pixel of rest) {
    studio.grid.cellAt(pixel).dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
  }
  document.dispatchEvent(new MouseEvent("mouseup"));
}

describe("studio against a live service", () => {
  const GLYPH = [0, 1, 2, 5, 8, 11, 14]; // a 3-wide hook shape on a 4x4 retina

  it("runs the full draw/teach/recognize/inspect round trip", async () => {
    const studio = mountStudio();
    await studio.track(studio.start());
    await studio.whenIdle();

    // create a small model through the form
    (studio.query("#new-name") as HTMLInputElement).value = "e2e";
    (studio.query("#new-width") as HTMLInputElement).value = "4";
    (studio.query("#new-height") as HTMLInputElement).value = "4";
    (studio.query("#new-tuple") as HTMLInputElement).value = "2";
    studio
      .query<HTMLFormElement>("#new-model-form")
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await studio.whenIdle();
    expect(studio.model).not.toBeNull();
    expect(studio.model!.width).toBe(4);
    expect(studio.grid.width).toBe(4);

    // draw and teach
    drawGlyph(studio, GLYPH);
    const expectedBits = studio.grid.bits();
    expect(expectedBits.filter((b) => b === 1).length).toBe(GLYPH.length);
    studio.labelInput.value = "Hook";
    studio.teachButton.click();
    await studio.whenIdle();
    const chip = studio.query("#label-counts .chip");
    expect(chip.textContent).toBe("Hook: 1");

    // recognize the identical drawing: full score displayed
    studio.recognizeButton.click();
    await studio.whenIdle();
    const banner = studio.query("#decision-banner");
    expect(banner.textContent).toBe("I think this is a Hook");
    const outcome = studio.lastOutcome!;
    expect(outcome.decision).toBe("Hook");
    expect(outcome.unknown).toBe(false);
    const scoreRow = studio.query('.score-row[data-label="Hook"] .score-value');
    expect(scoreRow.textContent).toBe(String(studio.model!.num_tuples));

    // inspect: the view shows exactly what /neurons returned
    const dump = await new StudioApi(base).neurons(studio.model!.id, "Hook");
    studio.inspectSelect.value = "Hook";
    studio.inspectButton.click();
    await studio.whenIdle();
    const cards = studio.root.querySelectorAll("#neuron-tables .neuron-card");
    expect(cards.length).toBe(dump.neurons.length);
    dump.neurons.forEach((neuron, index) => {
      const rows = cards[index].querySelectorAll("tr[data-address]");
      const shown: Record<string, number> = {};
      rows.forEach((row) => {
        const address = (row as HTMLElement).dataset.address!;
        shown[address] = Number(row.querySelector(".counter")!.textContent);
      });
      expect(shown).toEqual(neuron);
    });

    // mental-image panel renders the PGM from the API
    const mental = await new StudioApi(base).mentalImage(studio.model!.id, "Hook");
    const pixels = studio.root.querySelectorAll("#mental-image-panel .pixel");
    expect(pixels.length).toBe(16);
    // one example: counts are the drawing itself, black where taught
    pixels.forEach((pixel, index) => {
      const background = (pixel as HTMLElement).style.background;
      const expected = expectedBits[index] === 1 ? "rgb(0, 0, 0)" : "rgb(255, 255, 255)";
      expect(background).toBe(expected);
      expect((pixel as HTMLElement).title.endsWith(`= ${mental.counts[index]}`)).toBe(true);
    });
  });

  it("shows the unknown state for an empty model and surfaces errors inline", async () => {
    const studio = mountStudio();
    await studio.track(studio.start());
    await studio.whenIdle();
    (studio.query("#new-name") as HTMLInputElement).value = "empty";
    (studio.query("#new-width") as HTMLInputElement).value = "4";
    (studio.query("#new-height") as HTMLInputElement).value = "4";
    (studio.query("#new-tuple") as HTMLInputElement).value = "2";
    studio
      .query<HTMLFormElement>("#new-model-form")
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await studio.whenIdle();

    studio.grid.toggle(0);
    studio.recognizeButton.click();
    await studio.whenIdle();
    expect(studio.query("#decision-banner").textContent).toBe(
      "I don't know what this image is",
    );
    expect(studio.query("#decision-banner").classList.contains("unknown")).toBe(true);

    // teaching without a label surfaces an inline error, not a crash
    studio.labelInput.value = "";
    studio.teachButton.click();
    await studio.whenIdle();
    expect(studio.query("#status").classList.contains("error")).toBe(true);

    // tie between two labels taught the identical drawing is badged
    studio.labelInput.value = "b-label";
    studio.teachButton.click();
    await studio.whenIdle();
    studio.labelInput.value = "a-label";
    studio.teachButton.click();
    await studio.whenIdle();
    studio.recognizeButton.click();
    await studio.whenIdle();
    expect(studio.lastOutcome!.tie_broken).toBe(true);
    expect(studio.query("#decision-banner").textContent).toBe(
      "I think this is a a-label",
    );
    expect(studio.root.querySelector(".badge")).not.toBeNull();
  });
});
