/**
 * Standalone figure renderer.
 *
 * Usage:
 *   node dist/cli.js --csv sweep1.csv --label "n=800" \
 *        [--csv sweep2.csv --label "n=1200" ...] \
 *        [--threshold 0.01 --threshold 0.2764] \
 *        [--title "..."] -o figure.svg
 */

import { FigureSpec, render } from "./figure.js";

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: cli --csv FILE --label TEXT [--csv FILE --label TEXT ...] " +
      "[--threshold X ...] [--title TEXT] [--width W] [--height H] -o OUTPUT.svg",
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): FigureSpec {
  const curves: { path: string; label: string }[] = [];
  const thresholds: number[] = [];
  let output: string | undefined;
  let title: string | undefined;
  let width: number | undefined;
  let height: number | undefined;
  let pendingCsv: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) usage(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--csv":
        if (pendingCsv !== undefined) curves.push({ path: pendingCsv, label: pendingCsv });
        pendingCsv = next();
        break;
      case "--label": {
        if (pendingCsv === undefined) usage("--label must follow --csv");
        curves.push({ path: pendingCsv, label: next() });
        pendingCsv = undefined;
        break;
      }
      case "--threshold": {
        const t = Number(next());
        if (!Number.isFinite(t)) usage("--threshold must be a number");
        thresholds.push(t);
        break;
      }
      case "--title":
        title = next();
        break;
      case "--width":
        width = Number(next());
        break;
      case "--height":
        height = Number(next());
        break;
      case "-o":
      case "--output":
        output = next();
        break;
      default:
        usage(`unknown flag ${arg}`);
    }
  }
  if (pendingCsv !== undefined) curves.push({ path: pendingCsv, label: pendingCsv });
  if (curves.length === 0) usage("at least one --csv is required");
  if (!output) usage("-o OUTPUT.svg is required");
  return { curves, thresholds, output, title, width, height };
}

const isMain = process.argv[1]?.endsWith("cli.js");
if (isMain) {
  try {
    const out = render(parseArgs(process.argv.slice(2)));
    console.log(`wrote ${out}`);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
