import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { StatementDoc } from "../src/model.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixtureText(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf-8");
}

export function goldenStatement(): StatementDoc {
  return JSON.parse(fixtureText("golden-statement.json")) as StatementDoc;
}

export function goldenGliText(): string {
  return fixtureText("golden-gli.json");
}
