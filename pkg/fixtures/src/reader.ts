/**
 * Just-enough class-file reader for the tracing interpreter: constant pool,
 * hierarchy, and method bodies. Attributes other than Code are skipped.
 */

export interface MethodInfo {
  name: string;
  desc: string;
  flags: number;
  code: Uint8Array | null;
}

export interface ClassInfo {
  name: string;
  superName: string | null;
  interfaces: string[];
  flags: number;
  methods: MethodInfo[];
}

type PoolEntry =
  | { tag: 1; text: string }
  | { tag: 7 | 8; index: number }
  | { tag: 9 | 10 | 11 | 12; a: number; b: number }
  | { tag: number };

export class Pool {
  constructor(private entries: (PoolEntry | null)[]) {}

  utf8(index: number): string {
    const e = this.entries[index];
    if (!e || e.tag !== 1) throw new Error(`pool[${index}] is not utf8`);
    return (e as { tag: 1; text: string }).text;
  }

  className(index: number): string {
    const e = this.entries[index];
    if (!e || e.tag !== 7) throw new Error(`pool[${index}] is not a class`);
    return this.utf8((e as { tag: 7; index: number }).index);
  }

  stringValue(index: number): string {
    const e = this.entries[index];
    if (!e || e.tag !== 8) throw new Error(`pool[${index}] is not a string`);
    return this.utf8((e as { tag: 8; index: number }).index);
  }

  memberRef(index: number): { owner: string; name: string; desc: string } {
    const e = this.entries[index] as { tag: number; a: number; b: number } | null;
    if (!e || (e.tag !== 9 && e.tag !== 10 && e.tag !== 11)) {
      throw new Error(`pool[${index}] is not a member reference`);
    }
    const nat = this.entries[e.b] as { tag: 12; a: number; b: number };
    return { owner: this.className(e.a), name: this.utf8(nat.a), desc: this.utf8(nat.b) };
  }
}

class Cursor {
  pos = 0;
  constructor(private data: Uint8Array) {}

  u1(): number { return this.data[this.pos++]; }
  u2(): number { return (this.u1() << 8) | this.u1(); }
  u4(): number { return (this.u2() << 16 >>> 0) + this.u2(); }
  raw(n: number): Uint8Array {
    const out = this.data.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }
}

export function readClass(data: Uint8Array): { info: ClassInfo; pool: Pool } {
  const c = new Cursor(data);
  if (c.u4() !== 0xcafebabe) throw new Error("bad magic");
  c.u2(); c.u2(); // version

  const count = c.u2();
  const entries: (PoolEntry | null)[] = new Array(count).fill(null);
  let i = 1;
  while (i < count) {
    const tag = c.u1();
    switch (tag) {
      case 1: {
        const len = c.u2();
        entries[i] = { tag: 1, text: new TextDecoder().decode(c.raw(len)) };
        break;
      }
      case 7: case 8: case 16: case 19: case 20:
        entries[i] = { tag: tag as 7 | 8, index: c.u2() };
        break;
      case 3: case 4:
        c.raw(4); entries[i] = { tag };
        break;
      case 5: case 6:
        c.raw(8); entries[i] = { tag };
        i += 1;
        break;
      case 9: case 10: case 11: case 12: case 17: case 18:
        entries[i] = { tag: tag as 9, a: c.u2(), b: c.u2() };
        break;
      case 15:
        c.u1(); c.u2(); entries[i] = { tag };
        break;
      default:
        throw new Error(`unknown constant tag ${tag}`);
    }
    i += 1;
  }
  const pool = new Pool(entries);

  const flags = c.u2();
  const name = pool.className(c.u2());
  const superIdx = c.u2();
  const superName = superIdx === 0 ? null : pool.className(superIdx);
  const interfaces: string[] = [];
  const ifaceCount = c.u2();
  for (let k = 0; k < ifaceCount; k++) interfaces.push(pool.className(c.u2()));

  const fieldCount = c.u2();
  for (let k = 0; k < fieldCount; k++) {
    c.u2(); c.u2(); c.u2();
    const attrs = c.u2();
    for (let a = 0; a < attrs; a++) { c.u2(); c.raw(c.u4()); }
  }

  const methods: MethodInfo[] = [];
  const methodCount = c.u2();
  for (let k = 0; k < methodCount; k++) {
    const mFlags = c.u2();
    const mName = pool.utf8(c.u2());
    const mDesc = pool.utf8(c.u2());
    let code: Uint8Array | null = null;
    const attrs = c.u2();
    for (let a = 0; a < attrs; a++) {
      const attrName = pool.utf8(c.u2());
      const length = c.u4();
      if (attrName === "Code") {
        const body = new Cursor(c.raw(length));
        body.u2(); body.u2();
        code = body.raw(body.u4()).slice();
      } else {
        c.raw(length);
      }
    }
    methods.push({ name: mName, desc: mDesc, flags: mFlags, code });
  }
  // class attributes are irrelevant here
  return { info: { name, superName, interfaces, flags, methods }, pool };
}

/** Number of local-variable slots the parameters occupy (long/double take two). */
export function parameterSlots(desc: string): number {
  let slots = 0;
  let i = 1;
  while (desc[i] !== ")") {
    const ch = desc[i];
    if (ch === "J" || ch === "D") {
      slots += 2; i += 1;
    } else if (ch === "L") {
      slots += 1; i = desc.indexOf(";", i) + 1;
    } else if (ch === "[") {
      i += 1;
      while (desc[i] === "[") i += 1;
      if (desc[i] === "L") i = desc.indexOf(";", i) + 1; else i += 1;
      slots += 1;
    } else {
      slots += 1; i += 1;
    }
  }
  return slots;
}

export function returnsVoid(desc: string): boolean {
  return desc.endsWith(")V");
}
