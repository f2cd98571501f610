// Local evaluation of the five review commands over the loaded page.
// This is the fast half of the two-step workflow: the same command text is
// posted to the server, which stays authoritative over the full scope.

import type { ReviewRecord } from "./types.js";

export type LocalCommand =
  | { kind: "sort"; attribute: string; direction: "asc" | "desc" }
  | { kind: "filter"; attribute: string; comparator: string; value: number }
  | { kind: "grep"; pattern: string; caseInsensitive: boolean }
  | { kind: "color"; attribute: string }
  | { kind: "reset" };

export class CommandParseError extends Error {}

const COMMAND_NAMES = ["tSort", "tFilter", "tGrep", "tColor", "tReset"];
const COMPARATORS = ["<=", ">=", "==", "!=", "<", ">"];

function escapeRegex(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function parseCommand(input: string): LocalCommand {
  const match = /^\s*([A-Za-z_]\w*)\s*\(\s*([\s\S]*?)\s*\)\s*$/.exec(input);
  if (!match) {
    throw new CommandParseError(
      `expected a command like name(arguments); names: ${COMMAND_NAMES.join(", ")}`,
    );
  }
  const [, name, args] = match;
  if (!COMMAND_NAMES.includes(name)) {
    throw new CommandParseError(`unknown command '${name}'; valid: ${COMMAND_NAMES.join(", ")}`);
  }

  if (name === "tReset") {
    if (args.trim()) throw new CommandParseError("tReset takes no arguments");
    return { kind: "reset" };
  }

  if (name === "tGrep") {
    const arg = args.trim();
    if (arg.startsWith("/")) {
      const end = arg.lastIndexOf("/");
      if (end === 0) throw new CommandParseError("unterminated regular expression");
      const flags = arg.slice(end + 1).trim();
      if (flags !== "" && flags !== "i") {
        throw new CommandParseError(`unsupported regex flags '${flags}'`);
      }
      const pattern = arg.slice(1, end);
      try {
        new RegExp(pattern);
      } catch (err) {
        throw new CommandParseError(`invalid regular expression: ${(err as Error).message}`);
      }
      return { kind: "grep", pattern, caseInsensitive: flags === "i" };
    }
    if ((arg.startsWith('"') || arg.startsWith("'")) && arg.length >= 2 && arg.endsWith(arg[0])) {
      return { kind: "grep", pattern: escapeRegex(arg.slice(1, -1)), caseInsensitive: true };
    }
    throw new CommandParseError("tGrep argument must be /pattern/ or a quoted string");
  }

  const parts = args.length === 0 ? [] : args.split(",").map((p) => p.trim());
  if (name === "tColor") {
    if (parts.length !== 1 || !parts[0]) {
      throw new CommandParseError("tColor takes exactly one attribute argument");
    }
    return { kind: "color", attribute: parts[0] };
  }
  if (name === "tSort") {
    if (parts.length < 1 || parts.length > 2 || !parts[0]) {
      throw new CommandParseError("tSort takes an attribute and an optional direction");
    }
    let direction: "asc" | "desc" = "desc";
    if (parts.length === 2) {
      const d = parts[1].toLowerCase();
      if (d !== "asc" && d !== "desc") {
        throw new CommandParseError(`sort direction must be asc or desc, not '${parts[1]}'`);
      }
      direction = d;
    }
    return { kind: "sort", attribute: parts[0], direction };
  }

  // tFilter(attr, cmpOp number)
  if (parts.length !== 2 || !parts[0]) {
    throw new CommandParseError("tFilter takes an attribute and a predicate like '> 0.5'");
  }
  const predicate = parts[1];
  const op = COMPARATORS.find((candidate) => predicate.startsWith(candidate));
  if (!op) {
    throw new CommandParseError(`tFilter predicate must start with one of ${COMPARATORS.join(" ")}`);
  }
  const numberText = predicate.slice(op.length).trim();
  const value = Number(numberText);
  if (numberText === "" || Number.isNaN(value)) {
    throw new CommandParseError(`tFilter value is not a number: '${numberText}'`);
  }
  return { kind: "filter", attribute: parts[0], comparator: op, value };
}

export function attributeValue(review: ReviewRecord, attribute: string): number | null {
  if (attribute === "sentiment") return review.sentiment;
  if (attribute === "length") return review.text.length;
  const chip = review.chips.find((c) => c.attribute === attribute);
  return chip ? chip.score : null;
}

const FILTER_OPS: Record<string, (a: number, b: number) => boolean> = {
  "<": (a, b) => a < b,
  "<=": (a, b) => a <= b,
  ">": (a, b) => a > b,
  ">=": (a, b) => a >= b,
  "==": (a, b) => a === b,
  "!=": (a, b) => a !== b,
};

/** Apply one command to the loaded reviews; color/reset leave them as-is. */
export function applyLocal(reviews: ReviewRecord[], cmd: LocalCommand): ReviewRecord[] {
  if (cmd.kind === "sort") {
    const present = reviews.filter((r) => attributeValue(r, cmd.attribute) !== null);
    const absent = reviews.filter((r) => attributeValue(r, cmd.attribute) === null);
    const sign = cmd.direction === "desc" ? -1 : 1;
    // stable sort on value; absent reviews go last either direction
    const sorted = present
      .map((r, i) => ({ r, i, v: attributeValue(r, cmd.attribute) as number }))
      .sort((a, b) => (a.v === b.v ? a.i - b.i : sign * (a.v - b.v)))
      .map((entry) => entry.r);
    return [...sorted, ...absent];
  }
  if (cmd.kind === "filter") {
    const op = FILTER_OPS[cmd.comparator];
    return reviews.filter((r) => {
      const value = attributeValue(r, cmd.attribute);
      return value !== null && op(value, cmd.value);
    });
  }
  if (cmd.kind === "grep") {
    const regex = new RegExp(cmd.pattern, cmd.caseInsensitive ? "i" : "");
    return reviews.filter((r) => regex.test(r.text));
  }
  return reviews;
}
