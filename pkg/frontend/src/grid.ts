// Clickable bit grid at retina resolution. Cells are plain DOM nodes so
// the grid works (and is testable) without a canvas; mouse-drag paints
// with the value chosen on mousedown.

export class BitGrid {
  readonly element: HTMLDivElement;
  private cells: HTMLDivElement[] = [];
  private values: number[] = [];
  private painting = false;
  private paintValue = 1;
  onchange: (() => void) | null = null;

  constructor(
    public width: number,
    public height: number,
  ) {
    this.element = document.createElement("div");
    this.element.className = "bitgrid";
    this.element.addEventListener("mouseleave", () => {
      this.painting = false;
    });
    document.addEventListener("mouseup", () => {
      this.painting = false;
    });
    this.rebuild();
  }

  resize(width: number, height: number): void {
    this.width = width;
    this.height = height;
    this.rebuild();
  }

  private rebuild(): void {
    this.element.innerHTML = "";
    this.element.style.gridTemplateColumns = `repeat(${this.width}, 1fr)`;
    this.values = new Array(this.width * this.height).fill(0);
    this.cells = [];
    for (let i = 0; i < this.values.length; i++) {
      const cell = document.createElement("div");
      cell.className = "cell";
      cell.dataset.index = String(i);
      cell.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.painting = true;
        this.paintValue = this.values[i] ? 0 : 1;
        this.set(i, this.paintValue);
      });
      cell.addEventListener("mouseover", () => {
        if (this.painting) this.set(i, this.paintValue);
      });
      this.element.appendChild(cell);
      this.cells.push(cell);
    }
  }

  set(index: number, value: number): void {
    if (this.values[index] === value) return;
    this.values[index] = value;
    this.cells[index].classList.toggle("on", value === 1);
    this.onchange?.();
  }

  toggle(index: number): void {
    this.set(index, this.values[index] ? 0 : 1);
  }

  bits(): number[] {
    return this.values.slice();
  }

  setBits(bits: number[]): void {
    if (bits.length !== this.values.length) {
      throw new Error(`expected ${this.values.length} bits, got ${bits.length}`);
    }
    bits.forEach((bit, i) => this.set(i, bit ? 1 : 0));
  }

  clear(): void {
    this.values.forEach((_, i) => this.set(i, 0));
  }

  isEmpty(): boolean {
    return this.values.every((v) => v === 0);
  }

  cellAt(index: number): HTMLDivElement {
    return this.cells[index];
  }
}
