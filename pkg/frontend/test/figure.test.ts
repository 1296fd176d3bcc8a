import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { SchemaError } from "../src/csv.js";
import { render, renderSvg } from "../src/figure.js";
import { parseArgs } from "../src/cli.js";

const HEADER = "axis,value,successes,replicas,mean_survivor_z,mean_absorb_time";

function writeCsv(dir: string, name: string, rows: string[]): string {
  const path = join(dir, name);
  writeFileSync(path, [HEADER, ...rows].join("\n") + "\n");
  return path;
}

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "figures-"));
}

function z0Rows(successes: number[]): string[] {
  const grid = [0.02, 0.1, 0.2, 0.35, 0.5];
  return successes.map((s, i) => `z0,${grid[i]},${s},100,,`);
}

describe("renderSvg", () => {
  it("renders a Fig. 2-style plot from three CSVs with threshold verticals (B1)", () => {
    const dir = tmp();
    const a = writeCsv(dir, "n800.csv", z0Rows([2, 30, 80, 95, 99]));
    const b = writeCsv(dir, "n1200.csv", z0Rows([1, 25, 85, 97, 100]));
    const c = writeCsv(dir, "n1600.csv", z0Rows([0, 20, 90, 99, 100]));
    const output = join(dir, "fig2.svg");
    render({
      curves: [
        { path: a, label: "n=800" },
        { path: b, label: "n=1200" },
        { path: c, label: "n=1600" },
      ],
      thresholds: [0.01, 0.2764],
      output,
    });
    expect(existsSync(output)).toBe(true);
    const svg = readFileSync(output, "utf8");
    expect(svg).toContain("<svg");
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBe(2);
    // every plotted point carries its exact CSV ratio
    const ys = [...svg.matchAll(/data-y="([^"]+)"/g)].map((m) => Number(m[1]));
    const expected = [
      [2, 30, 80, 95, 99],
      [1, 25, 85, 97, 100],
      [0, 20, 90, 99, 100],
    ].flatMap((row) => row.map((s) => s / 100));
    expect(ys).toEqual(expected);
  });

  it("is deterministic", () => {
    const dir = tmp();
    const a = writeCsv(dir, "a.csv", z0Rows([5, 20, 50, 80, 95]));
    const spec = { curves: [{ path: a, label: "x" }], output: join(dir, "o.svg") };
    expect(renderSvg(spec)).toBe(renderSvg(spec));
  });

  it("handles a single-row CSV without crashing", () => {
    const dir = tmp();
    const a = writeCsv(dir, "one.csv", ["z0,0.3,40,100,,"]);
    const svg = renderSvg({ curves: [{ path: a, label: "one" }], output: "" });
    expect(svg).toContain('data-y="0.4"');
  });

  it("rejects empty CSVs", () => {
    const dir = tmp();
    const path = join(dir, "empty.csv");
    writeFileSync(path, "");
    expect(() => renderSvg({ curves: [{ path, label: "x" }], output: "" })).toThrow(
      SchemaError,
    );
  });

  it("rejects thresholds on beta-axis figures", () => {
    const dir = tmp();
    const a = writeCsv(dir, "b.csv", ["beta,2,5,100,,", "beta,10,95,100,0.9,"]);
    expect(() =>
      renderSvg({ curves: [{ path: a, label: "x" }], thresholds: [0.01], output: "" }),
    ).toThrow(/z0-axis/);
  });

  it("rejects curves with mismatched axes", () => {
    const dir = tmp();
    const a = writeCsv(dir, "z.csv", z0Rows([1, 2, 3, 4, 5]));
    const b = writeCsv(dir, "b.csv", ["beta,2,5,100,,"]);
    expect(() =>
      renderSvg({
        curves: [
          { path: a, label: "z" },
          { path: b, label: "b" },
        ],
        output: "",
      }),
    ).toThrow(/axis/);
  });
});

describe("parseArgs", () => {
  it("builds a spec from flags", () => {
    const spec = parseArgs([
      "--csv", "a.csv", "--label", "n=800",
      "--csv", "b.csv", "--label", "n=1200",
      "--threshold", "0.01", "--threshold", "0.2764",
      "--title", "Fig 2", "-o", "out.svg",
    ]);
    expect(spec.curves).toEqual([
      { path: "a.csv", label: "n=800" },
      { path: "b.csv", label: "n=1200" },
    ]);
    expect(spec.thresholds).toEqual([0.01, 0.2764]);
    expect(spec.output).toBe("out.svg");
    expect(spec.title).toBe("Fig 2");
  });

  it("defaults the label to the file name", () => {
    const spec = parseArgs(["--csv", "a.csv", "-o", "out.svg"]);
    expect(spec.curves).toEqual([{ path: "a.csv", label: "a.csv" }]);
  });
});
