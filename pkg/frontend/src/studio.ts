// The studio: one page where a human interleaves teaching and
// recognition against a live model and can open the black box to see
// exactly what the neurons hold.

import { ApiError, ModelDetail, Outcome, StudioApi } from "./api.js";
import { BitGrid } from "./grid.js";
import { decodeBase64, parsePgm } from "./pgm.js";

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

export function columnName(index: number): string {
  // A..Z, then AA, AB, ... like spreadsheet columns
  let name = "";
  let i = index;
  do {
    name = String.fromCharCode(65 + (i % 26)) + name;
    i = Math.floor(i / 26) - 1;
  } while (i >= 0);
  return name;
}

export function coordinateName(pixel: number, width: number): string {
  const row = Math.floor(pixel / width) + 1;
  const column = pixel % width;
  return `${columnName(column)}${row}`;
}

export class Studio {
  readonly grid: BitGrid;
  model: ModelDetail | null = null;
  lastOutcome: Outcome | null = null;
  private chain: Promise<unknown> = Promise.resolve();

  // the important controls, queryable by tests
  readonly modelSelect: HTMLSelectElement;
  readonly labelInput: HTMLInputElement;
  readonly teachButton: HTMLButtonElement;
  readonly recognizeButton: HTMLButtonElement;
  readonly inspectSelect: HTMLSelectElement;
  readonly inspectButton: HTMLButtonElement;
  readonly speakToggle: HTMLInputElement;

  constructor(
    readonly root: HTMLElement,
    readonly api: StudioApi,
  ) {
    root.innerHTML = `
      <header>
        <h1>wisardlab studio</h1>
        <span id="status" class="status"></span>
      </header>
      <section class="models-bar">
        <label>model
          <select id="model-select"></select>
        </label>
        <button id="refresh-models" type="button">refresh</button>
        <form id="new-model-form">
          <input id="new-name" placeholder="name" value="studio model" />
          <input id="new-width" type="number" value="16" min="1" title="width" />
          <input id="new-height" type="number" value="16" min="1" title="height" />
          <input id="new-tuple" type="number" value="4" min="1" max="24" title="tuple size" />
          <button type="submit">new model</button>
        </form>
      </section>
      <main>
        <section class="panel">
          <h2>retina</h2>
          <div id="grid-slot"></div>
          <div class="row">
            <button id="clear-drawing" type="button">clear</button>
            <input id="label-input" list="known-labels" placeholder="label" />
            <datalist id="known-labels"></datalist>
            <button id="teach-button" type="button">teach</button>
            <button id="recognize-button" type="button">recognize</button>
          </div>
          <label class="row"><input type="checkbox" id="speak-toggle" /> speak results</label>
          <div id="label-counts" class="counts"></div>
        </section>
        <section class="panel">
          <h2>answer</h2>
          <div id="outcome-panel"><p class="muted">nothing recognized yet</p></div>
        </section>
        <section class="panel wide">
          <h2>black box</h2>
          <div class="row">
            <select id="inspect-label"></select>
            <button id="inspect-button" type="button">open</button>
          </div>
          <div id="inspect-view"></div>
        </section>
      </main>
    `;

    this.grid = new BitGrid(16, 16);
    this.query("#grid-slot").appendChild(this.grid.element);

    this.modelSelect = this.query("#model-select");
    this.labelInput = this.query("#label-input");
    this.teachButton = this.query("#teach-button");
    this.recognizeButton = this.query("#recognize-button");
    this.inspectSelect = this.query("#inspect-label");
    this.inspectButton = this.query("#inspect-button");
    this.speakToggle = this.query("#speak-toggle");

    this.query("#refresh-models").addEventListener("click", () =>
      this.track(this.loadModels()),
    );
    this.modelSelect.addEventListener("change", () =>
      this.track(this.selectModel(this.modelSelect.value)),
    );
    this.query<HTMLFormElement>("#new-model-form").addEventListener("submit", (event) => {
      event.preventDefault();
      this.track(this.createModel());
    });
    this.query("#clear-drawing").addEventListener("click", () => this.grid.clear());
    this.teachButton.addEventListener("click", () => this.track(this.teach()));
    this.recognizeButton.addEventListener("click", () => this.track(this.recognize()));
    this.inspectButton.addEventListener("click", () =>
      this.track(this.inspect(this.inspectSelect.value)),
    );
  }

  query<T extends HTMLElement = HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  /** Serialize actions and remember the chain so tests can await it. */
  track<T>(work: Promise<T>): Promise<T> {
    const settled = work.catch((error) => this.showError(error));
    this.chain = this.chain.then(() => settled);
    return work;
  }

  whenIdle(): Promise<unknown> {
    return this.chain;
  }

  private showError(error: unknown): void {
    const status = this.query("#status");
    status.classList.add("error");
    status.textContent =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
  }

  private showStatus(text: string): void {
    const status = this.query("#status");
    status.classList.remove("error");
    status.textContent = text;
  }

  private setBusy(busy: boolean): void {
    // at most one in-flight mutating request per model
    this.teachButton.disabled = busy;
    this.recognizeButton.disabled = busy;
  }

  async start(): Promise<void> {
    await this.loadModels();
  }

  async loadModels(): Promise<void> {
    const models = await this.api.listModels();
    const current = this.modelSelect.value;
    this.modelSelect.innerHTML = "";
    for (const model of models) {
      const option = el("option");
      option.value = model.id;
      option.textContent = `${model.name} (${model.width}x${model.height})`;
      this.modelSelect.appendChild(option);
    }
    const pick = models.find((m) => m.id === current)?.id ?? models[0]?.id;
    if (pick) {
      this.modelSelect.value = pick;
      await this.selectModel(pick);
    } else {
      this.model = null;
      this.showStatus("no models yet; create one");
    }
  }

  async createModel(): Promise<void> {
    const detail = await this.api.createModel({
      name: this.query<HTMLInputElement>("#new-name").value || "studio model",
      width: Number(this.query<HTMLInputElement>("#new-width").value),
      height: Number(this.query<HTMLInputElement>("#new-height").value),
      tuple_size: Number(this.query<HTMLInputElement>("#new-tuple").value),
    });
    await this.loadModels();
    this.modelSelect.value = detail.id;
    await this.selectModel(detail.id);
  }

  async selectModel(id: string): Promise<void> {
    this.model = await this.api.getModel(id);
    // the drawing grid always mirrors the model's retina
    if (
      this.grid.width !== this.model.width ||
      this.grid.height !== this.model.height
    ) {
      this.grid.resize(this.model.width, this.model.height);
    }
    this.lastOutcome = null;
    this.renderLabels(this.model.labels);
    this.query("#outcome-panel").innerHTML = `<p class="muted">nothing recognized yet</p>`;
    this.query("#inspect-view").innerHTML = "";
    this.showStatus(`model ${this.model.name}: ${this.model.num_tuples} neurons per class`);
  }

  private renderLabels(labels: Record<string, number>): void {
    const counts = this.query("#label-counts");
    counts.innerHTML = "";
    const datalist = this.query("#known-labels");
    datalist.innerHTML = "";
    this.inspectSelect.innerHTML = "";
    for (const [label, count] of Object.entries(labels).sort()) {
      const chip = el("span", "chip", `${label}: ${count}`);
      chip.dataset.label = label;
      counts.appendChild(chip);
      const option = el("option");
      option.value = label;
      datalist.appendChild(option);
      const inspectOption = el("option", undefined, label);
      inspectOption.value = label;
      this.inspectSelect.appendChild(inspectOption);
    }
  }

  async teach(): Promise<void> {
    if (!this.model) throw new Error("select a model first");
    const label = this.labelInput.value.trim();
    if (!label) throw new Error("give the drawing a label first");
    this.setBusy(true);
    try {
      const counts = await this.api.train(
        this.model.id,
        label,
        this.grid.bits(),
        this.model.width,
        this.model.height,
      );
      this.renderLabels(counts);
      this.showStatus(`taught "${label}" (${counts[label]} example${counts[label] === 1 ? "" : "s"})`);
    } finally {
      this.setBusy(false);
    }
  }

  async recognize(): Promise<void> {
    if (!this.model) throw new Error("select a model first");
    this.setBusy(true);
    try {
      const outcome = await this.api.classify(
        this.model.id,
        this.grid.bits(),
        this.model.width,
        this.model.height,
      );
      this.lastOutcome = outcome;
      this.renderOutcome(outcome);
      this.speak(outcome);
    } finally {
      this.setBusy(false);
    }
  }

  private renderOutcome(outcome: Outcome): void {
    const panel = this.query("#outcome-panel");
    panel.innerHTML = "";
    const banner = el(
      "div",
      outcome.unknown ? "decision unknown" : "decision",
      outcome.unknown ? "I don't know what this image is" : `I think this is a ${outcome.decision}`,
    );
    banner.id = "decision-banner";
    panel.appendChild(banner);
    if (outcome.tie_broken) {
      panel.appendChild(el("span", "badge", "tie broken"));
    }

    const bars = el("div", "scores");
    const scale = this.model?.num_tuples || 1;
    for (const [label, score] of Object.entries(outcome.scores).sort()) {
      const row = el("div", "score-row");
      row.dataset.label = label;
      row.appendChild(el("span", "score-label", label));
      const bar = el("div", "bar");
      const fill = el("div", "fill");
      fill.style.width = `${Math.round((100 * score) / scale)}%`;
      bar.appendChild(fill);
      row.appendChild(bar);
      row.appendChild(el("span", "score-value", String(score)));
      bars.appendChild(row);
    }
    panel.appendChild(bars);

    const trace = el("div", "trace");
    trace.appendChild(el("h3", undefined, `bleaching (final b = ${outcome.final_bleach})`));
    for (const step of outcome.trace) {
      const scores = Object.entries(step.scores)
        .sort()
        .map(([label, score]) => `${label} ${score}`)
        .join(", ");
      trace.appendChild(el("div", "trace-step", `b=${step.bleach}: ${scores || "no classes"}`));
    }
    panel.appendChild(trace);
  }

  private speak(outcome: Outcome): void {
    if (!this.speakToggle.checked) return;
    const synthesis = (window as { speechSynthesis?: SpeechSynthesis }).speechSynthesis;
    if (!synthesis || typeof SpeechSynthesisUtterance === "undefined") return;
    const text = outcome.unknown
      ? "I don't know what this image is"
      : `I think this is a ${outcome.decision}`;
    synthesis.speak(new SpeechSynthesisUtterance(text));
  }

  async inspect(label: string): Promise<void> {
    if (!this.model) throw new Error("select a model first");
    if (!label) throw new Error("teach a label first, then open it");
    const [dump, mental] = await Promise.all([
      this.api.neurons(this.model.id, label),
      this.api.mentalImage(this.model.id, label),
    ]);
    const view = this.query("#inspect-view");
    view.innerHTML = "";

    const compare = el("div", "compare");
    compare.appendChild(
      this.pixelPanel("your drawing", this.model.width, this.model.height, (i) =>
        this.grid.bits()[i] ? "#111" : "#fff",
      ),
    );
    const image = parsePgm(decodeBase64(mental.pgm_base64));
    const mentalPanel = this.pixelPanel(
      `mental image of "${label}" (max count ${mental.max_count})`,
      image.width,
      image.height,
      (i) => `rgb(${image.luminance[i]}, ${image.luminance[i]}, ${image.luminance[i]})`,
      (i) => `${coordinateName(i, image.width)} = ${mental.counts[i]}`,
    );
    mentalPanel.id = "mental-image-panel";
    compare.appendChild(mentalPanel);
    view.appendChild(compare);

    const tables = el("div", "neurons");
    tables.id = "neuron-tables";
    dump.neurons.forEach((neuron, index) => {
      const card = el("div", "neuron-card");
      const tuple = dump.tuples[index]
        .map((pixel) => coordinateName(pixel, this.model!.width))
        .join(", ");
      card.appendChild(el("h4", undefined, `neuron ${index} — tuple (${tuple})`));
      const table = el("table");
      const head = el("tr");
      head.appendChild(el("th", undefined, "address"));
      head.appendChild(el("th", undefined, "counter"));
      table.appendChild(head);
      const entries = Object.entries(neuron).sort();
      if (entries.length === 0) {
        const row = el("tr", "muted");
        const cell = el("td", undefined, "empty (all zeros)");
        cell.colSpan = 2;
        row.appendChild(cell);
        table.appendChild(row);
      }
      for (const [address, counter] of entries) {
        const row = el("tr");
        row.dataset.address = address;
        row.appendChild(el("td", "addr", address));
        row.appendChild(el("td", "counter", String(counter)));
        table.appendChild(row);
      }
      card.appendChild(table);
      tables.appendChild(card);
    });
    view.appendChild(tables);
    this.showStatus(`opened "${label}": ${dump.examples_trained} example(s) written into ${dump.neurons.length} neurons`);
  }

  /** A small read-only pixel grid with battleship coordinate labels. */
  private pixelPanel(
    title: string,
    width: number,
    height: number,
    color: (index: number) => string,
    tooltip?: (index: number) => string,
  ): HTMLDivElement {
    const panel = el("div", "pixel-panel");
    panel.appendChild(el("h4", undefined, title));
    const grid = el("div", "pixelgrid");
    grid.style.gridTemplateColumns = `auto repeat(${width}, 1fr)`;
    grid.appendChild(el("span"));
    for (let c = 0; c < width; c++) {
      grid.appendChild(el("span", "coord", columnName(c)));
    }
    for (let r = 0; r < height; r++) {
      grid.appendChild(el("span", "coord", String(r + 1)));
      for (let c = 0; c < width; c++) {
        const index = r * width + c;
        const cell = el("div", "pixel");
        cell.style.background = color(index);
        if (tooltip) cell.title = tooltip(index);
        grid.appendChild(cell);
      }
    }
    panel.appendChild(grid);
    return panel;
  }
}
