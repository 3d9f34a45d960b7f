/**
 * Trace agent: loads a program's containers, runs each entry point in a
 * fresh interpreter pass sharing one trace, and returns the trace text.
 *
 * Entry points run in sorted reference order. JUnit-style entries get a
 * fresh instance of the declaring class; main methods are invoked with a
 * null argument array.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { EntrySpec, MAIN_DESC, ProgramSpec } from "./corpus.js";
import { Interpreter, Value } from "./interpreter.js";

function loadContainer(interpreter: Interpreter, root: string): void {
  const walk = (dir: string): void => {
    for (const entry of fs.readdirSync(dir, { withFileTypes: true }).sort(
      (a, b) => a.name.localeCompare(b.name))) {
      const full = path.join(dir, entry.name);
      if (entry.isDirectory()) walk(full);
      else if (entry.name.endsWith(".class")) interpreter.load(fs.readFileSync(full));
    }
  };
  walk(root);
}

function entryKey(entry: EntrySpec): string {
  return `${entry.className}.${entry.methodName}${entry.desc}`;
}

export function runAgent(fixturesRoot: string, program: ProgramSpec,
                         runtimeContainer: string): string {
  const interpreter = new Interpreter();
  loadContainer(interpreter, path.join(fixturesRoot, runtimeContainer));
  for (const dep of program.deps) {
    loadContainer(interpreter, path.join(fixturesRoot, dep));
  }
  loadContainer(interpreter, path.join(fixturesRoot, program.container));

  interpreter.trace.push(`# ${program.name} fixture trace`);
  const entries = [...program.entries].sort((a, b) =>
    entryKey(a).localeCompare(entryKey(b)));
  for (const entry of entries) {
    if (entry.kind === "main") {
      interpreter.invoke(entry.className, "main", MAIN_DESC, [null]);
    } else {
      const instance = interpreter.construct(entry.className);
      const args: Value[] = [instance];
      interpreter.invoke(entry.className, entry.methodName, entry.desc, args);
    }
  }
  return interpreter.trace.join("\n") + "\n";
}
