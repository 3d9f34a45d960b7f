/**
 * Minimal JVM class-file emitter (major version 61).
 *
 * Produces structurally valid class files with real constant pools, code
 * attributes, and runtime-visible method annotations. No stack-map frames
 * are emitted; the consumers of these fixtures never verify.
 */

export const ACC_PUBLIC = 0x0001;
export const ACC_PRIVATE = 0x0002;
export const ACC_PROTECTED = 0x0004;
export const ACC_STATIC = 0x0008;
export const ACC_SUPER = 0x0020;
export const ACC_BRIDGE = 0x0040;
export const ACC_NATIVE = 0x0100;
export const ACC_INTERFACE = 0x0200;
export const ACC_ABSTRACT = 0x0400;
export const ACC_SYNTHETIC = 0x1000;

class ByteBuffer {
  private chunks: number[] = [];

  u1(v: number): this {
    this.chunks.push(v & 0xff);
    return this;
  }

  u2(v: number): this {
    return this.u1(v >>> 8).u1(v);
  }

  u4(v: number): this {
    return this.u2(v >>> 16).u2(v);
  }

  bytes(data: Uint8Array | number[]): this {
    for (const b of data) this.chunks.push(b & 0xff);
    return this;
  }

  get length(): number {
    return this.chunks.length;
  }

  build(): Uint8Array {
    return Uint8Array.from(this.chunks);
  }
}

export class ConstPool {
  private byKey = new Map<string, number>();
  private encoded: Uint8Array[] = [];

  private add(key: string, encode: () => Uint8Array): number {
    const existing = this.byKey.get(key);
    if (existing !== undefined) return existing;
    const index = this.encoded.length + 1;
    this.byKey.set(key, index);
    this.encoded.push(encode());
    return index;
  }

  utf8(text: string): number {
    const raw = new TextEncoder().encode(text);
    return this.add(`u:${text}`, () =>
      new ByteBuffer().u1(1).u2(raw.length).bytes(raw).build());
  }

  klass(name: string): number {
    const nameIdx = this.utf8(name);
    return this.add(`c:${name}`, () => new ByteBuffer().u1(7).u2(nameIdx).build());
  }

  string(text: string): number {
    const textIdx = this.utf8(text);
    return this.add(`s:${text}`, () => new ByteBuffer().u1(8).u2(textIdx).build());
  }

  nat(name: string, desc: string): number {
    const n = this.utf8(name);
    const d = this.utf8(desc);
    return this.add(`n:${name}:${desc}`, () => new ByteBuffer().u1(12).u2(n).u2(d).build());
  }

  methodref(owner: string, name: string, desc: string): number {
    const c = this.klass(owner);
    const nat = this.nat(name, desc);
    return this.add(`m:${owner}.${name}${desc}`, () =>
      new ByteBuffer().u1(10).u2(c).u2(nat).build());
  }

  ifaceMethodref(owner: string, name: string, desc: string): number {
    const c = this.klass(owner);
    const nat = this.nat(name, desc);
    return this.add(`im:${owner}.${name}${desc}`, () =>
      new ByteBuffer().u1(11).u2(c).u2(nat).build());
  }

  fieldref(owner: string, name: string, desc: string): number {
    const c = this.klass(owner);
    const nat = this.nat(name, desc);
    return this.add(`f:${owner}.${name}:${desc}`, () =>
      new ByteBuffer().u1(9).u2(c).u2(nat).build());
  }

  build(): Uint8Array {
    const out = new ByteBuffer().u2(this.encoded.length + 1);
    for (const entry of this.encoded) out.bytes(entry);
    return out.build();
  }
}

/** Tiny assembler; branch targets are labels patched at build time. */
export class Asm {
  private buf: number[] = [];
  private labels = new Map<string, number>();
  private patches: Array<[number, string]> = [];

  constructor(private pool: ConstPool) {}

  label(name: string): this {
    this.labels.set(name, this.buf.length);
    return this;
  }

  private op(...raw: number[]): this {
    for (const b of raw) this.buf.push(b & 0xff);
    return this;
  }

  private u2(v: number): this {
    return this.op(v >>> 8, v);
  }

  aconstNull(): this { return this.op(0x01); }

  iconst(v: number): this {
    if (v >= -1 && v <= 5) return this.op(0x03 + v);
    if (v >= -128 && v <= 127) return this.op(0x10, v);
    return this.op(0x11).u2(v);
  }

  lconst(v: 0 | 1): this { return this.op(0x09 + v); }

  ldcStr(text: string): this {
    const index = this.pool.string(text);
    if (index <= 255) return this.op(0x12, index);
    return this.op(0x13).u2(index);
  }

  iload(slot: number): this { return slot <= 3 ? this.op(0x1a + slot) : this.op(0x15, slot); }
  aload(slot: number): this { return slot <= 3 ? this.op(0x2a + slot) : this.op(0x19, slot); }
  istore(slot: number): this { return slot <= 3 ? this.op(0x3b + slot) : this.op(0x36, slot); }
  astore(slot: number): this { return slot <= 3 ? this.op(0x4b + slot) : this.op(0x3a, slot); }

  pop(): this { return this.op(0x57); }
  pop2(): this { return this.op(0x58); }
  dup(): this { return this.op(0x59); }
  iadd(): this { return this.op(0x60); }
  ladd(): this { return this.op(0x61); }
  isub(): this { return this.op(0x64); }
  imul(): this { return this.op(0x68); }

  private branch(opcode: number, target: string): this {
    this.patches.push([this.buf.length, target]);
    return this.op(opcode, 0, 0);
  }

  ifIcmplt(target: string): this { return this.branch(0xa1, target); }
  ifIcmpge(target: string): this { return this.branch(0xa2, target); }
  goto(target: string): this { return this.branch(0xa7, target); }

  ireturn(): this { return this.op(0xac); }
  lreturn(): this { return this.op(0xad); }
  areturn(): this { return this.op(0xb0); }
  vreturn(): this { return this.op(0xb1); }

  new_(owner: string): this { return this.op(0xbb).u2(this.pool.klass(owner)); }
  checkcast(owner: string): this { return this.op(0xc0).u2(this.pool.klass(owner)); }

  putfield(owner: string, name: string, desc: string): this {
    return this.op(0xb5).u2(this.pool.fieldref(owner, name, desc));
  }

  invokevirtual(owner: string, name: string, desc: string): this {
    return this.op(0xb6).u2(this.pool.methodref(owner, name, desc));
  }

  invokespecial(owner: string, name: string, desc: string): this {
    return this.op(0xb7).u2(this.pool.methodref(owner, name, desc));
  }

  invokestatic(owner: string, name: string, desc: string): this {
    return this.op(0xb8).u2(this.pool.methodref(owner, name, desc));
  }

  invokeinterface(owner: string, name: string, desc: string, count: number): this {
    return this.op(0xb9).u2(this.pool.ifaceMethodref(owner, name, desc)).op(count, 0);
  }

  build(): Uint8Array {
    const out = Uint8Array.from(this.buf);
    for (const [offset, target] of this.patches) {
      const to = this.labels.get(target);
      if (to === undefined) throw new Error(`undefined label ${target}`);
      const delta = to - offset;
      out[offset + 1] = (delta >> 8) & 0xff;
      out[offset + 2] = delta & 0xff;
    }
    return out;
  }
}

interface MethodSpec {
  flags: number;
  name: string;
  desc: string;
  body: Uint8Array | null;
  annotations: string[];
}

export class ClassFile {
  readonly pool = new ConstPool();
  private fields: Array<[number, string, string]> = [];
  private methods: MethodSpec[] = [];

  constructor(
    readonly name: string,
    readonly superName: string | null = "java/lang/Object",
    readonly flags: number = ACC_PUBLIC | ACC_SUPER,
    readonly interfaces: string[] = [],
    readonly major: number = 61,
  ) {}

  code(): Asm {
    return new Asm(this.pool);
  }

  field(name: string, desc: string, flags = ACC_PRIVATE): this {
    this.fields.push([flags, name, desc]);
    return this;
  }

  method(name: string, desc: string, flags: number, code?: Asm, annotations: string[] = []): this {
    this.methods.push({
      flags, name, desc,
      body: code ? code.build() : null,
      annotations,
    });
    return this;
  }

  build(): Uint8Array {
    const pool = this.pool;
    const thisIdx = pool.klass(this.name);
    const superIdx = this.superName ? pool.klass(this.superName) : 0;
    const ifaceIdx = this.interfaces.map((i) => pool.klass(i));

    const fields = new ByteBuffer().u2(this.fields.length);
    for (const [flags, name, desc] of this.fields) {
      fields.u2(flags).u2(pool.utf8(name)).u2(pool.utf8(desc)).u2(0);
    }

    const methods = new ByteBuffer().u2(this.methods.length);
    for (const m of this.methods) {
      const attrs: Uint8Array[] = [];
      if (m.body !== null) {
        const code = new ByteBuffer()
          .u2(8).u2(8)                        // max_stack, max_locals: generous, unverified
          .u4(m.body.length).bytes(m.body)
          .u2(0).u2(0);                       // exception table, nested attributes
        attrs.push(new ByteBuffer()
          .u2(pool.utf8("Code")).u4(code.length).bytes(code.build()).build());
      }
      if (m.annotations.length > 0) {
        const body = new ByteBuffer().u2(m.annotations.length);
        for (const ann of m.annotations) body.u2(pool.utf8(`L${ann};`)).u2(0);
        attrs.push(new ByteBuffer()
          .u2(pool.utf8("RuntimeVisibleAnnotations")).u4(body.length).bytes(body.build()).build());
      }
      methods.u2(m.flags).u2(pool.utf8(m.name)).u2(pool.utf8(m.desc)).u2(attrs.length);
      for (const attr of attrs) methods.bytes(attr);
    }

    const out = new ByteBuffer()
      .u4(0xcafebabe).u2(0).u2(this.major)
      .bytes(pool.build())
      .u2(this.flags).u2(thisIdx).u2(superIdx)
      .u2(ifaceIdx.length);
    for (const i of ifaceIdx) out.u2(i);
    out.bytes(fields.build()).bytes(methods.build()).u2(0);
    return out.build();
  }
}
