/**
 * End-to-end: build the corpus, run the trace agent, then drive the
 * analyzer CLI over the generated artifacts and compare against the
 * manifest expectations.
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";

import { buildAll } from "../src/build.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = path.resolve(HERE, "..", "..");

interface MethodExpectation {
  reachable: boolean;
  mask: string[];
}

interface StaticExpectation {
  methods: Record<string, MethodExpectation>;
  edges: [string, string][];
}

interface Program {
  name: string;
  project: string;
  deps: string[];
  reflective: boolean;
  static: { cha: StaticExpectation; rta?: StaticExpectation; rta_same_as_cha?: boolean } | null;
  static_error: string | null;
  lint: { criterion: string; subject: string }[];
  trace: string | null;
  dynamic: { executed: Record<string, string[]> } | null;
  dynamic_error: string | null;
}

let fixturesDir: string;
let manifest: { runtime: string[]; programs: Program[] };
let workDir: string;

function cli(args: string[]): { status: number; stdout: string; stderr: string } {
  try {
    const stdout = execFileSync("python3", ["-m", "ioreach.cli", ...args], {
      cwd: REPO_ROOT,
      encoding: "utf-8",
      stdio: ["ignore", "pipe", "pipe"],
    });
    return { status: 0, stdout, stderr: "" };
  } catch (error) {
    const failure = error as { status?: number; stdout?: string; stderr?: string };
    return {
      status: failure.status ?? -1,
      stdout: failure.stdout?.toString() ?? "",
      stderr: failure.stderr?.toString() ?? "",
    };
  }
}

function containerArgs(program: Program): string[] {
  const args = ["--project", path.join(fixturesDir, program.project)];
  for (const dep of program.deps) args.push("--dep", path.join(fixturesDir, dep));
  for (const runtime of manifest.runtime) {
    args.push("--runtime", path.join(fixturesDir, runtime));
  }
  return args;
}

function readMethodRecords(outDir: string): Map<string, { flag: string; mask: string[] }> {
  const records = new Map<string, { flag: string; mask: string[] }>();
  const text = fs.readFileSync(path.join(outDir, "methods.tsv"), "utf-8");
  for (const line of text.split("\n")) {
    if (!line) continue;
    const [ref, flag, mask] = line.split("\t");
    records.set(ref, { flag, mask: mask ? mask.split(",") : [] });
  }
  return records;
}

beforeAll(() => {
  const built = buildAll(path.join(HERE, "..", "build"));
  fixturesDir = built.fixturesDir;
  manifest = JSON.parse(fs.readFileSync(path.join(fixturesDir, "manifest.json"), "utf-8"));
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "ioreach-e2e-"));
});

describe("end-to-end over generated fixtures", () => {
  it("builds traces for every runnable program", () => {
    for (const program of manifest.programs) {
      if (program.trace) {
        expect(fs.existsSync(path.join(fixturesDir, program.trace))).toBe(true);
      }
    }
  });

  it("static analysis matches the manifest for both algorithms", () => {
    for (const program of manifest.programs) {
      if (program.static === null) {
        const result = cli(["analyze", ...containerArgs(program),
                            "--out", path.join(workDir, `${program.name}-err`)]);
        expect(result.status, program.name).toBe(1);
        expect(result.stderr).toContain("app/e4/Native.custom()J");
        continue;
      }
      const variants: Array<["cha" | "rta", StaticExpectation]> = [
        ["cha", program.static.cha],
        ["rta", program.static.rta_same_as_cha ? program.static.cha : program.static.rta!],
      ];
      for (const [algo, expectation] of variants) {
        const outDir = path.join(workDir, `${program.name}-${algo}`);
        const result = cli(["analyze", ...containerArgs(program),
                            "--algo", algo, "--out", outDir]);
        expect(result.status, `${program.name} ${algo}: ${result.stderr}`).toBe(0);
        const records = readMethodRecords(outDir);
        const expected = Object.entries(expectation.methods);
        expect(records.size, `${program.name} ${algo}`).toBe(expected.length);
        for (const [ref, methodExpectation] of expected) {
          const record = records.get(ref);
          expect(record, `${program.name} ${algo} ${ref}`).toBeDefined();
          expect(record!.flag).toBe(methodExpectation.reachable ? "true" : "false");
          expect([...record!.mask].sort(), `${program.name} ${algo} ${ref}`)
            .toEqual([...methodExpectation.mask].sort());
        }
      }
    }
  });

  it("lint findings match the manifest", () => {
    for (const program of manifest.programs) {
      const outDir = path.join(workDir, `${program.name}-lint`);
      cli(["analyze", ...containerArgs(program), "--out", outDir]);
      const lintText = fs.readFileSync(path.join(outDir, "lint.csv"), "utf-8");
      const rows = lintText.trim().split("\n").slice(1).filter((row) => row.length > 0)
        .map((row) => {
          const [criterion, subject] = row.split(",");
          return { criterion, subject };
        });
      expect(rows, program.name).toEqual(program.lint);
    }
  });

  it("dynamic attribution of agent traces matches the manifest", () => {
    for (const program of manifest.programs) {
      if (!program.trace) continue;
      const outDir = path.join(workDir, `${program.name}-dyn`);
      const result = cli(["trace-analyze", ...containerArgs(program),
                          "--trace", path.join(fixturesDir, program.trace),
                          "--out", outDir]);
      if (program.dynamic === null) {
        expect(program.dynamic_error).toBe("uncatalogued-native");
        expect(result.status, program.name).toBe(1);
        continue;
      }
      expect(result.status, `${program.name}: ${result.stderr}`).toBe(0);
      const records = readMethodRecords(outDir);
      const expected = Object.entries(program.dynamic.executed);
      expect(records.size, program.name).toBe(expected.length);
      for (const [ref, mask] of expected) {
        const record = records.get(ref);
        expect(record, `${program.name} ${ref}`).toBeDefined();
        expect([...record!.mask].sort(), `${program.name} ${ref}`)
          .toEqual([...mask].sort());
      }
    }
  });

  it("every dynamic I/O caller is statically flagged (soundness containment)", () => {
    const DYNAMIC_IO = new Set(["desktop", "time", "files", "network", "os"]);
    const STATIC_IO = new Set([...DYNAMIC_IO, "invocation"]);
    for (const program of manifest.programs) {
      if (!program.dynamic || !program.static || program.reflective) continue;
      for (const [ref, mask] of Object.entries(program.dynamic.executed)) {
        if (!mask.some((category) => DYNAMIC_IO.has(category))) continue;
        const staticExpectation = program.static.cha.methods[ref];
        expect(staticExpectation, `${program.name} ${ref}`).toBeDefined();
        expect(staticExpectation.reachable, `${program.name} ${ref}`).toBe(true);
        expect(staticExpectation.mask.some((category) => STATIC_IO.has(category)),
               `${program.name} ${ref}`).toBe(true);
      }
    }
  });
});
