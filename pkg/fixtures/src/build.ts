/**
 * Build entry point: emits the fixture corpus (class-file directory
 * containers), the expectations manifest, and one trace per runnable
 * program into build/fixtures/.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { runAgent } from "./agent.js";
import { buildCorpus, ProgramSpec } from "./corpus.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));

export function buildAll(outRoot: string): { fixturesDir: string; programs: ProgramSpec[] } {
  const fixturesDir = path.join(outRoot, "fixtures");
  fs.rmSync(fixturesDir, { recursive: true, force: true });

  const { classes, programs } = buildCorpus();
  for (const emitted of classes) {
    const target = path.join(fixturesDir, emitted.container, emitted.name + ".class");
    fs.mkdirSync(path.dirname(target), { recursive: true });
    fs.writeFileSync(target, emitted.data);
  }

  const manifestSource = path.join(HERE, "..", "src", "manifest.json");
  fs.copyFileSync(manifestSource, path.join(fixturesDir, "manifest.json"));

  const tracesDir = path.join(fixturesDir, "traces");
  fs.mkdirSync(tracesDir, { recursive: true });
  for (const program of programs) {
    if (!program.traced) continue;
    const trace = runAgent(fixturesDir, program, "runtime");
    fs.writeFileSync(path.join(tracesDir, `${program.name}.trace`), trace);
  }
  return { fixturesDir, programs };
}

const invokedDirectly = process.argv[1] !== undefined
  && path.resolve(process.argv[1]) === fileURLToPath(import.meta.url);
if (invokedDirectly) {
  const outRoot = process.argv[2] ?? path.join(HERE, "..", "build");
  const { fixturesDir, programs } = buildAll(outRoot);
  const traced = programs.filter((p) => p.traced).length;
  console.log(`built fixture corpus (${programs.length} programs, ${traced} traces) -> ${fixturesDir}`);
}
