import { beforeEach, describe, expect, it } from "vitest";
import { BitGrid } from "../src/grid";

describe("BitGrid", () => {
  let grid: BitGrid;

  beforeEach(() => {
    document.body.innerHTML = "";
    grid = new BitGrid(3, 2);
    document.body.appendChild(grid.element);
  });

  it("starts empty with width*height cells", () => {
    expect(grid.bits()).toEqual([0, 0, 0, 0, 0, 0]);
    expect(grid.element.querySelectorAll(".cell").length).toBe(6);
    expect(grid.isEmpty()).toBe(true);
  });

  it("toggles cells and round-trips bits", () => {
    grid.toggle(0);
    grid.toggle(4);
    expect(grid.bits()).toEqual([1, 0, 0, 0, 1, 0]);
    grid.toggle(0);
    expect(grid.bits()).toEqual([0, 0, 0, 0, 1, 0]);
    grid.setBits([1, 1, 0, 0, 0, 1]);
    expect(grid.bits()).toEqual([1, 1, 0, 0, 0, 1]);
  });

  it("paints by mouse drag with the value chosen on mousedown", () => {
    const cell = (i: number) => grid.cellAt(i);
    cell(0).dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    cell(1).dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
    cell(2).dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
    document.dispatchEvent(new MouseEvent("mouseup"));
    expect(grid.bits()).toEqual([1, 1, 1, 0, 0, 0]);
    // dragging from a set cell erases
    cell(1).dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    cell(2).dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
    document.dispatchEvent(new MouseEvent("mouseup"));
    expect(grid.bits()).toEqual([1, 0, 0, 0, 0, 0]);
  });

  it("does not paint without a mousedown", () => {
    grid.cellAt(3).dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
    expect(grid.isEmpty()).toBe(true);
  });

  it("marks painted cells with the on class", () => {
    grid.toggle(5);
    expect(grid.cellAt(5).classList.contains("on")).toBe(true);
  });

  it("resizes to new dimensions and clears", () => {
    grid.toggle(0);
    grid.resize(2, 2);
    expect(grid.bits()).toEqual([0, 0, 0, 0]);
    expect(grid.element.querySelectorAll(".cell").length).toBe(4);
  });

  it("notifies onchange", () => {
    let calls = 0;
    grid.onchange = () => calls++;
    grid.toggle(0);
    grid.toggle(0);
    grid.set(1, 1);
    grid.set(1, 1); // no change, no call
    expect(calls).toBe(3);
  });

  it("rejects wrong-length setBits", () => {
    expect(() => grid.setBits([1, 0])).toThrow(/expected 6 bits/);
  });
});
