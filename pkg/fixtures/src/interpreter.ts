/**
 * Bytecode interpreter that doubles as the tracing agent: every method
 * entry emits an `E` record and every native invocation emits an `N`
 * record carrying the live stack, innermost frame first, in the
 * analyzer's trace wire format.
 *
 * Native methods are simulated: they return a type-appropriate dummy
 * value, except the reflective accessor, which resolves its Method
 * argument and executes the target inside the native frame so nested
 * native calls show the full reflective chain.
 */

import { ClassInfo, MethodInfo, Pool, readClass, returnsVoid } from "./reader.js";

const ACC_STATIC = 0x0008;
const ACC_NATIVE = 0x0100;

export interface JObject {
  cls: string;
  fields: Map<string, Value>;
}

export type Value = number | string | null | JObject | { long: number };

interface Frame {
  cls: string;
  name: string;
  desc: string;
}

interface LoadedClass {
  info: ClassInfo;
  pool: Pool;
}

function isLong(v: Value): v is { long: number } {
  return typeof v === "object" && v !== null && "long" in v;
}

/** Parameter type descriptors, in order. */
export function parseParams(desc: string): string[] {
  const params: string[] = [];
  let i = 1;
  while (desc[i] !== ")") {
    const start = i;
    while (desc[i] === "[") i += 1;
    if (desc[i] === "L") i = desc.indexOf(";", i) + 1;
    else i += 1;
    params.push(desc.slice(start, i));
  }
  return params;
}

function zeroValue(desc: string): Value | undefined {
  const ret = desc.slice(desc.indexOf(")") + 1);
  if (ret === "V") return undefined;
  if (ret === "J") return { long: 0 };
  if (ret === "D" || ret === "F") return 0;
  if ("IZBSC".includes(ret)) return 0;
  return null;
}

export class Interpreter {
  private classes = new Map<string, LoadedClass>();
  private frames: Frame[] = [];
  private steps = 0;
  readonly trace: string[] = [];
  threadId = 1;

  load(data: Uint8Array): void {
    const loaded = readClass(data);
    this.classes.set(loaded.info.name, loaded);
  }

  private emitEntry(frame: Frame): void {
    this.trace.push(`E ${this.threadId} ${frame.cls} ${frame.name} ${frame.desc}`);
  }

  private emitNativeCall(cls: string, name: string, desc: string): void {
    const stack = [{ cls, name, desc }, ...[...this.frames].reverse()];
    this.trace.push(`N ${this.threadId} ${stack.length}`);
    for (const frame of stack) {
      this.trace.push(`F ${frame.cls} ${frame.name} ${frame.desc}`);
    }
  }

  private resolve(start: string, name: string, desc: string):
      { owner: string; method: MethodInfo } | null {
    let current: string | null = start;
    while (current !== null) {
      const cls: LoadedClass | undefined = this.classes.get(current);
      if (!cls) return null;
      const method = cls.info.methods.find((m) => m.name === name && m.desc === desc);
      if (method) return { owner: current, method };
      current = cls.info.superName;
    }
    return null;
  }

  /** Invoke a method by reference; returns its value (undefined for void). */
  invoke(owner: string, name: string, desc: string, args: Value[]): Value | undefined {
    const resolved = this.resolve(owner, name, desc);
    if (!resolved) {
      throw new Error(`cannot resolve ${owner}.${name}${desc}`);
    }
    const { owner: declaring, method } = resolved;
    if (method.flags & ACC_NATIVE) {
      return this.invokeNative(declaring, method, args);
    }
    if (!method.code) throw new Error(`no body for ${declaring}.${name}${desc}`);
    const frame: Frame = { cls: declaring, name, desc };
    this.frames.push(frame);
    this.emitEntry(frame);
    try {
      return this.execute(this.classes.get(declaring)!, method, args);
    } finally {
      this.frames.pop();
    }
  }

  construct(className: string): JObject {
    const instance: JObject = { cls: className, fields: new Map() };
    this.invoke(className, "<init>", "()V", [instance]);
    return instance;
  }

  private invokeNative(owner: string, method: MethodInfo, args: Value[]): Value | undefined {
    this.emitNativeCall(owner, method.name, method.desc);
    const key = `${owner}.${method.name}`;
    if (key === "jdk/internal/reflect/NativeMethodAccessorImpl.invoke0") {
      const target = args[0] as JObject;
      const cls = target.fields.get("clazz") as string;
      const name = target.fields.get("name") as string;
      const desc = target.fields.get("desc") as string;
      const frame: Frame = { cls: owner, name: method.name, desc: method.desc };
      this.frames.push(frame);
      try {
        this.invoke(cls, name, desc, []);
      } finally {
        this.frames.pop();
      }
      return null;
    }
    return zeroValue(method.desc);
  }

  private execute(loaded: LoadedClass, method: MethodInfo, args: Value[]): Value | undefined {
    const code = method.code!;
    const pool = loaded.pool;
    const locals: (Value | undefined)[] = new Array(16).fill(undefined);
    let slot = 0;
    const params = parseParams(method.desc);
    const values = [...args];
    if (!(method.flags & ACC_STATIC)) {
      locals[slot++] = values.shift();
    }
    for (const param of params) {
      locals[slot] = values.shift();
      slot += param === "J" || param === "D" ? 2 : 1;
    }

    const stack: Value[] = [];
    const push = (v: Value) => stack.push(v);
    const pop = (): Value => {
      if (stack.length === 0) throw new Error("operand stack underflow");
      return stack.pop() as Value;
    };
    const u2At = (at: number) => (code[at] << 8) | code[at + 1];
    const s2At = (at: number) => (u2At(at) << 16) >> 16;

    let pc = 0;
    while (pc < code.length) {
      if (++this.steps > 1_000_000) throw new Error("step budget exceeded");
      const op = code[pc];
      switch (op) {
        case 0x01: push(null); pc += 1; break;
        case 0x02: case 0x03: case 0x04: case 0x05:
        case 0x06: case 0x07: case 0x08:
          push(op - 0x03); pc += 1; break;
        case 0x09: case 0x0a: push({ long: op - 0x09 }); pc += 1; break;
        case 0x10: push((code[pc + 1] << 24) >> 24); pc += 2; break;
        case 0x11: push(s2At(pc + 1)); pc += 3; break;
        case 0x12: push(pool.stringValue(code[pc + 1])); pc += 2; break;
        case 0x15: case 0x19: push(locals[code[pc + 1]] as Value); pc += 2; break;
        case 0x1a: case 0x1b: case 0x1c: case 0x1d:
          push(locals[op - 0x1a] as Value); pc += 1; break;
        case 0x2a: case 0x2b: case 0x2c: case 0x2d:
          push(locals[op - 0x2a] as Value); pc += 1; break;
        case 0x36: case 0x3a: locals[code[pc + 1]] = pop(); pc += 2; break;
        case 0x3b: case 0x3c: case 0x3d: case 0x3e:
          locals[op - 0x3b] = pop(); pc += 1; break;
        case 0x4b: case 0x4c: case 0x4d: case 0x4e:
          locals[op - 0x4b] = pop(); pc += 1; break;
        case 0x57: pop(); pc += 1; break;
        case 0x58: {
          const top = pop();
          if (!isLong(top)) pop();
          pc += 1;
          break;
        }
        case 0x59: {
          const top = pop();
          push(top); push(top);
          pc += 1;
          break;
        }
        case 0x60: { const b = pop() as number, a = pop() as number; push((a + b) | 0); pc += 1; break; }
        case 0x61: {
          const b = pop(), a = pop();
          if (!isLong(a) || !isLong(b)) throw new Error("ladd on non-long");
          push({ long: a.long + b.long });
          pc += 1;
          break;
        }
        case 0x64: { const b = pop() as number, a = pop() as number; push((a - b) | 0); pc += 1; break; }
        case 0x68: { const b = pop() as number, a = pop() as number; push(Math.imul(a, b)); pc += 1; break; }
        case 0x84: {
          const index = code[pc + 1];
          locals[index] = ((locals[index] as number) + ((code[pc + 2] << 24) >> 24)) | 0;
          pc += 3;
          break;
        }
        case 0xa1: case 0xa2: {
          const b = pop() as number, a = pop() as number;
          const taken = op === 0xa1 ? a < b : a >= b;
          pc = taken ? pc + s2At(pc + 1) : pc + 3;
          break;
        }
        case 0xa7: pc += s2At(pc + 1); break;
        case 0xac: case 0xad: case 0xb0: return pop();
        case 0xb1: return undefined;
        case 0xbb: {
          const cls = pool.className(u2At(pc + 1));
          push({ cls, fields: new Map() });
          pc += 3;
          break;
        }
        case 0xc0: pc += 3; break; // checkcast: fixtures never cast incompatibly
        case 0xb5: {
          const ref = pool.memberRef(u2At(pc + 1));
          const value = pop();
          const target = pop() as JObject;
          target.fields.set(ref.name, value);
          pc += 3;
          break;
        }
        case 0xb6: case 0xb7: case 0xb8: case 0xb9: {
          const ref = pool.memberRef(u2At(pc + 1));
          const argCount = parseParams(ref.desc).length;
          const callArgs: Value[] = [];
          for (let k = 0; k < argCount; k++) callArgs.unshift(pop());
          let result: Value | undefined;
          if (op === 0xb8) {
            result = this.invoke(ref.owner, ref.name, ref.desc, callArgs);
          } else {
            const receiver = pop();
            const start = op === 0xb7
              ? ref.owner
              : (receiver as JObject)?.cls ?? ref.owner;
            result = this.invoke(start, ref.name, ref.desc, [receiver, ...callArgs]);
          }
          if (!returnsVoid(ref.desc)) push(result as Value);
          pc += op === 0xb9 ? 5 : 3;
          break;
        }
        default:
          throw new Error(`unsupported opcode 0x${op.toString(16)} at ${pc}`);
      }
    }
    throw new Error(`fell off the end of ${method.name}${method.desc}`);
  }
}
