/**
 * Parser for the sweep result CSV produced by the simulation toolkit.
 *
 * Schema: "axis,value,successes,replicas,mean_survivor_z,mean_absorb_time",
 * one row per grid point. The last two fields may be empty.
 */

export interface SweepRow {
  axis: "beta" | "z0";
  value: number;
  successes: number;
  replicas: number;
  meanSurvivorZ: number | null;
  meanAbsorbTime: number | null;
}

export class SchemaError extends Error {}

export const EXPECTED_HEADER = [
  "axis",
  "value",
  "successes",
  "replicas",
  "mean_survivor_z",
  "mean_absorb_time",
];

function parseNumber(field: string, column: string, line: number): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(
      `line ${line}: column "${column}" is not a number: ${JSON.stringify(field)}`,
    );
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== "");
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header line");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (let i = 0; i < EXPECTED_HEADER.length; i++) {
    if (header[i] !== EXPECTED_HEADER[i]) {
      throw new SchemaError(
        `header column ${i + 1} is ${JSON.stringify(header[i] ?? "")}, ` +
          `expected "${EXPECTED_HEADER[i]}"`,
      );
    }
  }
  if (header.length !== EXPECTED_HEADER.length) {
    throw new SchemaError(
      `header has ${header.length} columns, expected ${EXPECTED_HEADER.length}`,
    );
  }
  if (lines.length === 1) {
    throw new SchemaError("empty CSV: header but no data rows");
  }

  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== EXPECTED_HEADER.length) {
      throw new SchemaError(
        `line ${i + 1}: ${fields.length} fields, expected ${EXPECTED_HEADER.length}`,
      );
    }
    const axis = fields[0];
    if (axis !== "beta" && axis !== "z0") {
      throw new SchemaError(
        `line ${i + 1}: column "axis" must be beta or z0, got ${JSON.stringify(axis)}`,
      );
    }
    const successes = parseNumber(fields[2], "successes", i + 1);
    const replicas = parseNumber(fields[3], "replicas", i + 1);
    if (!Number.isInteger(successes) || successes < 0) {
      throw new SchemaError(`line ${i + 1}: column "successes" must be a nonnegative integer`);
    }
    if (!Number.isInteger(replicas) || replicas < 1) {
      throw new SchemaError(`line ${i + 1}: column "replicas" must be a positive integer`);
    }
    if (successes > replicas) {
      throw new SchemaError(`line ${i + 1}: successes ${successes} exceeds replicas ${replicas}`);
    }
    rows.push({
      axis,
      value: parseNumber(fields[1], "value", i + 1),
      successes,
      replicas,
      meanSurvivorZ:
        fields[4].trim() === "" ? null : parseNumber(fields[4], "mean_survivor_z", i + 1),
      meanAbsorbTime:
        fields[5].trim() === "" ? null : parseNumber(fields[5], "mean_absorb_time", i + 1),
    });
  }

  const axes = new Set(rows.map((r) => r.axis));
  if (axes.size > 1) {
    throw new SchemaError('column "axis" mixes beta and z0 within one file');
  }
  return rows;
}

/** Wilson score interval for a binomial proportion (95% by default). */
export function wilsonInterval(
  successes: number,
  trials: number,
  z = 1.96,
): { low: number; high: number } {
  const p = successes / trials;
  const z2 = z * z;
  const denom = 1 + z2 / trials;
  const center = (p + z2 / (2 * trials)) / denom;
  const margin = (z * Math.sqrt((p * (1 - p)) / trials + z2 / (4 * trials * trials))) / denom;
  return { low: Math.max(0, center - margin), high: Math.min(1, center + margin) };
}
