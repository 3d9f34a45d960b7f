/**
 * Fixture program definitions: a miniature runtime image, a JUnit-style
 * dependency, and twelve small projects with known analysis ground truth.
 *
 * Every native declared here carries a real JDK 17 signature present in
 * the analyzer's category database, so the corpus is analyzable without
 * extra data.
 */

import {
  ACC_ABSTRACT,
  ACC_BRIDGE,
  ACC_INTERFACE,
  ACC_NATIVE,
  ACC_PRIVATE,
  ACC_PROTECTED,
  ACC_PUBLIC,
  ACC_STATIC,
  ACC_SUPER,
  ACC_SYNTHETIC,
  ClassFile,
} from "./classfile.js";

const STR = "Ljava/lang/String;";
const OBJ = "Ljava/lang/Object;";
export const MAIN_DESC = "([Ljava/lang/String;)V";

export interface EmittedClass {
  container: string;
  name: string;
  data: Uint8Array;
}

export interface EntrySpec {
  className: string;
  methodName: string;
  desc: string;
  kind: "main" | "junit3" | "junit4" | "junit5";
}

export interface ProgramSpec {
  name: string;
  container: string;
  deps: string[];
  entries: EntrySpec[];
  traced: boolean;
}

function defaultCtor(cf: ClassFile, superName = "java/lang/Object", flags = ACC_PUBLIC): void {
  cf.method("<init>", "()V", flags,
    cf.code().aload(0).invokespecial(superName, "<init>", "()V").vreturn());
}

function emitRuntime(out: EmittedClass[]): void {
  const container = "runtime";
  const add = (cf: ClassFile) => out.push({ container, name: cf.name, data: cf.build() });

  const object = new ClassFile("java/lang/Object", null);
  object.method("<init>", "()V", ACC_PUBLIC, object.code().vreturn());
  object.method("hashCode", "()I", ACC_PUBLIC | ACC_NATIVE);
  add(object);

  for (const name of ["java/lang/String", "java/lang/Integer",
                      "java/io/FileDescriptor", "java/net/InetAddress"]) {
    const cf = new ClassFile(name);
    defaultCtor(cf);
    add(cf);
  }

  const system = new ClassFile("java/lang/System");
  defaultCtor(system, "java/lang/Object", ACC_PRIVATE);
  system.method("nanoTime", "()J", ACC_PUBLIC | ACC_STATIC | ACC_NATIVE);
  system.method("currentTimeMillis", "()J", ACC_PUBLIC | ACC_STATIC | ACC_NATIVE);
  add(system);

  const fis = new ClassFile("java/io/FileInputStream");
  fis.method("<init>", `(${STR})V`, ACC_PUBLIC,
    fis.code().aload(0).invokespecial("java/lang/Object", "<init>", "()V")
      .aload(0).aload(1).invokespecial("java/io/FileInputStream", "open0", `(${STR})V`)
      .vreturn());
  fis.method("open0", `(${STR})V`, ACC_PRIVATE | ACC_NATIVE);
  fis.method("read", "()I", ACC_PUBLIC,
    fis.code().aload(0).invokespecial("java/io/FileInputStream", "read0", "()I").ireturn());
  fis.method("read0", "()I", ACC_PRIVATE | ACC_NATIVE);
  add(fis);

  const socket = new ClassFile("java/net/Socket");
  defaultCtor(socket);
  socket.method("connect", `(${STR}I)V`, ACC_PUBLIC,
    socket.code().iconst(0).aconstNull().aconstNull().iload(2)
      .invokestatic("sun/nio/ch/Net", "connect0",
        "(ZLjava/io/FileDescriptor;Ljava/net/InetAddress;I)I")
      .pop().vreturn());
  add(socket);

  const net = new ClassFile("sun/nio/ch/Net");
  defaultCtor(net, "java/lang/Object", ACC_PRIVATE);
  net.method("connect0", "(ZLjava/io/FileDescriptor;Ljava/net/InetAddress;I)I",
    ACC_PRIVATE | ACC_STATIC | ACC_NATIVE);
  add(net);

  const method = new ClassFile("java/lang/reflect/Method");
  method.field("clazz", STR).field("name", STR).field("desc", STR);
  method.method("<init>", `(${STR}${STR}${STR})V`, ACC_PUBLIC,
    method.code().aload(0).invokespecial("java/lang/Object", "<init>", "()V")
      .aload(0).aload(1).putfield("java/lang/reflect/Method", "clazz", STR)
      .aload(0).aload(2).putfield("java/lang/reflect/Method", "name", STR)
      .aload(0).aload(3).putfield("java/lang/reflect/Method", "desc", STR)
      .vreturn());
  method.method("invoke", `(${OBJ}[${OBJ})${OBJ}`, ACC_PUBLIC,
    method.code().aload(0).aload(1).aload(2)
      .invokestatic("jdk/internal/reflect/NativeMethodAccessorImpl", "invoke0",
        `(Ljava/lang/reflect/Method;${OBJ}[${OBJ})${OBJ}`)
      .areturn());
  add(method);

  const accessor = new ClassFile("jdk/internal/reflect/NativeMethodAccessorImpl");
  defaultCtor(accessor, "java/lang/Object", ACC_PRIVATE);
  accessor.method("invoke0", `(Ljava/lang/reflect/Method;${OBJ}[${OBJ})${OBJ}`,
    ACC_PRIVATE | ACC_STATIC | ACC_NATIVE);
  add(accessor);
}

function emitJunitDep(out: EmittedClass[]): void {
  const container = "deps/junit";
  const assert = new ClassFile("junit/framework/Assert");
  defaultCtor(assert, "java/lang/Object", ACC_PROTECTED);
  out.push({ container, name: assert.name, data: assert.build() });
  const testCase = new ClassFile("junit/framework/TestCase", "junit/framework/Assert");
  defaultCtor(testCase, "junit/framework/Assert");
  out.push({ container, name: testCase.name, data: testCase.build() });
}

function emitProjects(out: EmittedClass[]): ProgramSpec[] {
  const programs: ProgramSpec[] = [];
  const add = (container: string, cf: ClassFile) =>
    out.push({ container, name: cf.name, data: cf.build() });
  const mainEntry = (className: string): EntrySpec => ({
    className, methodName: "main", desc: MAIN_DESC, kind: "main",
  });

  {
    const container = "projects/pure";
    const main = new ClassFile("app/pure/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().iconst(8).invokestatic("app/pure/Calc", "fib", "(I)I").istore(1).vreturn());
    add(container, main);
    const calc = new ClassFile("app/pure/Calc");
    defaultCtor(calc);
    calc.method("fib", "(I)I", ACC_PUBLIC | ACC_STATIC,
      calc.code().iload(0).iconst(2).ifIcmplt("base")
        .iload(0).iconst(1).isub().invokestatic("app/pure/Calc", "fib", "(I)I")
        .iload(0).iconst(2).isub().invokestatic("app/pure/Calc", "fib", "(I)I")
        .iadd().ireturn()
        .label("base").iload(0).ireturn());
    add(container, calc);
    programs.push({ name: "pure", container, deps: [],
                    entries: [mainEntry("app/pure/Main")], traced: true });
  }

  {
    const container = "projects/hash";
    const main = new ClassFile("app/hash/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("java/lang/Object").dup()
        .invokespecial("java/lang/Object", "<init>", "()V").astore(1)
        .aload(1).invokevirtual("java/lang/Object", "hashCode", "()I").pop().vreturn());
    add(container, main);
    programs.push({ name: "hash", container, deps: [],
                    entries: [mainEntry("app/hash/Main")], traced: true });
  }

  {
    const container = "projects/time";
    const main = new ClassFile("app/time/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().invokestatic("app/time/Clock", "sample", "()J").pop2().vreturn());
    add(container, main);
    const clock = new ClassFile("app/time/Clock");
    defaultCtor(clock);
    clock.method("sample", "()J", ACC_PUBLIC | ACC_STATIC,
      clock.code().invokestatic("java/lang/System", "nanoTime", "()J")
        .invokestatic("java/lang/System", "currentTimeMillis", "()J")
        .ladd().lreturn());
    add(container, clock);
    programs.push({ name: "time", container, deps: [],
                    entries: [mainEntry("app/time/Main")], traced: true });
  }

  {
    const container = "projects/file";
    const main = new ClassFile("app/file/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("java/io/FileInputStream").dup().ldcStr("data.bin")
        .invokespecial("java/io/FileInputStream", "<init>", `(${STR})V`).astore(1)
        .aload(1).invokevirtual("java/io/FileInputStream", "read", "()I").pop().vreturn());
    add(container, main);
    programs.push({ name: "file", container, deps: [],
                    entries: [mainEntry("app/file/Main")], traced: true });
  }

  {
    const container = "projects/net";
    const main = new ClassFile("app/net/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("java/net/Socket").dup()
        .invokespecial("java/net/Socket", "<init>", "()V").astore(1)
        .aload(1).ldcStr("example.com").iconst(80)
        .invokevirtual("java/net/Socket", "connect", `(${STR}I)V`).vreturn());
    add(container, main);
    programs.push({ name: "net", container, deps: [],
                    entries: [mainEntry("app/net/Main")], traced: true });
  }

  {
    const container = "projects/reflect";
    const main = new ClassFile("app/reflect/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("java/lang/reflect/Method").dup()
        .ldcStr("app/reflect/Target").ldcStr("runIt").ldcStr("()V")
        .invokespecial("java/lang/reflect/Method", "<init>", `(${STR}${STR}${STR})V`)
        .astore(1)
        .aload(1).aconstNull().aconstNull()
        .invokevirtual("java/lang/reflect/Method", "invoke", `(${OBJ}[${OBJ})${OBJ}`)
        .pop().vreturn());
    add(container, main);
    const target = new ClassFile("app/reflect/Target");
    defaultCtor(target);
    target.method("runIt", "()V", ACC_PUBLIC | ACC_STATIC,
      target.code().invokestatic("java/lang/System", "nanoTime", "()J").pop2().vreturn());
    add(container, target);
    programs.push({ name: "reflect", container, deps: [],
                    entries: [mainEntry("app/reflect/Main")], traced: true });
  }

  {
    const container = "projects/junit";
    const calcTest = new ClassFile("app/junit/CalcTest");
    defaultCtor(calcTest);
    calcTest.method("t5", "()V", ACC_PUBLIC,
      calcTest.code().invokestatic("java/lang/System", "nanoTime", "()J").pop2().vreturn(),
      ["org/junit/jupiter/api/Test"]);
    calcTest.method("t4", "()V", ACC_PUBLIC,
      calcTest.code().iconst(2).iconst(3).imul().istore(1).vreturn(),
      ["org/junit/Test"]);
    add(container, calcTest);
    const legacy = new ClassFile("app/junit/LegacyTest", "junit/framework/TestCase");
    defaultCtor(legacy, "junit/framework/TestCase");
    legacy.method("testAdd", "()V", ACC_PUBLIC,
      legacy.code().iconst(1).iconst(1).iadd().istore(1).vreturn());
    add(container, legacy);
    programs.push({
      name: "junit", container, deps: ["deps/junit"],
      entries: [
        { className: "app/junit/CalcTest", methodName: "t4", desc: "()V", kind: "junit4" },
        { className: "app/junit/CalcTest", methodName: "t5", desc: "()V", kind: "junit5" },
        { className: "app/junit/LegacyTest", methodName: "testAdd", desc: "()V", kind: "junit3" },
      ],
      traced: true,
    });
  }

  {
    const container = "projects/e4";
    const main = new ClassFile("app/e4/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().invokestatic("app/e4/Native", "custom", "()J").pop2().vreturn());
    add(container, main);
    const native = new ClassFile("app/e4/Native");
    defaultCtor(native);
    native.method("custom", "()J", ACC_PRIVATE | ACC_STATIC | ACC_NATIVE);
    add(container, native);
    programs.push({ name: "e4", container, deps: [],
                    entries: [mainEntry("app/e4/Main")], traced: true });
  }

  {
    const container = "projects/e3";
    const main = new ClassFile("app/e3/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().invokestatic("missing/Gone", "f", "()V").vreturn());
    add(container, main);
    programs.push({ name: "e3", container, deps: [],
                    entries: [mainEntry("app/e3/Main")], traced: false });
  }

  {
    const container = "projects/e5";
    const main = new ClassFile("app/e5/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().invokestatic("jdk/incubator/vector/IntVector", "species", "()V").vreturn());
    add(container, main);
    programs.push({ name: "e5", container, deps: [],
                    entries: [mainEntry("app/e5/Main")], traced: false });
  }

  {
    const container = "projects/bridge";
    const ord = new ClassFile("app/bridge/Ord", "java/lang/Object",
      ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT);
    ord.method("rank", `(${OBJ})I`, ACC_PUBLIC | ACC_ABSTRACT);
    add(container, ord);
    const intOrd = new ClassFile("app/bridge/IntOrd", "java/lang/Object",
      ACC_PUBLIC | ACC_SUPER, ["app/bridge/Ord"]);
    defaultCtor(intOrd);
    intOrd.method("rank", "(Ljava/lang/Integer;)I", ACC_PUBLIC,
      intOrd.code().iconst(1).ireturn());
    intOrd.method("rank", `(${OBJ})I`, ACC_PUBLIC | ACC_BRIDGE | ACC_SYNTHETIC,
      intOrd.code().aload(0).aload(1).checkcast("java/lang/Integer")
        .invokevirtual("app/bridge/IntOrd", "rank", "(Ljava/lang/Integer;)I").ireturn());
    add(container, intOrd);
    const main = new ClassFile("app/bridge/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("app/bridge/IntOrd").dup()
        .invokespecial("app/bridge/IntOrd", "<init>", "()V").astore(1)
        .aload(1).aconstNull()
        .invokeinterface("app/bridge/Ord", "rank", `(${OBJ})I`, 2)
        .pop().vreturn());
    add(container, main);
    programs.push({ name: "bridge", container, deps: [],
                    entries: [mainEntry("app/bridge/Main")], traced: true });
  }

  {
    const container = "projects/dispatch";
    const runner = new ClassFile("app/dispatch/Runner", "java/lang/Object",
      ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT);
    runner.method("exec", "()V", ACC_PUBLIC | ACC_ABSTRACT);
    add(container, runner);
    const a = new ClassFile("app/dispatch/A", "java/lang/Object",
      ACC_PUBLIC | ACC_SUPER, ["app/dispatch/Runner"]);
    defaultCtor(a);
    a.method("exec", "()V", ACC_PUBLIC,
      a.code().invokestatic("java/lang/System", "nanoTime", "()J").pop2().vreturn());
    add(container, a);
    const b = new ClassFile("app/dispatch/B", "java/lang/Object",
      ACC_PUBLIC | ACC_SUPER, ["app/dispatch/Runner"]);
    defaultCtor(b);
    b.method("exec", "()V", ACC_PUBLIC,
      b.code().new_("java/io/FileInputStream").dup().ldcStr("b.dat")
        .invokespecial("java/io/FileInputStream", "<init>", `(${STR})V`).astore(1)
        .aload(1).invokevirtual("java/io/FileInputStream", "read", "()I").pop().vreturn());
    add(container, b);
    const main = new ClassFile("app/dispatch/Main");
    defaultCtor(main);
    main.method("main", MAIN_DESC, ACC_PUBLIC | ACC_STATIC,
      main.code().new_("app/dispatch/A").dup()
        .invokespecial("app/dispatch/A", "<init>", "()V").astore(1)
        .aload(1).invokeinterface("app/dispatch/Runner", "exec", "()V", 1)
        .vreturn());
    add(container, main);
    programs.push({ name: "dispatch", container, deps: [],
                    entries: [mainEntry("app/dispatch/Main")], traced: true });
  }

  return programs;
}

export function buildCorpus(): { classes: EmittedClass[]; programs: ProgramSpec[] } {
  const classes: EmittedClass[] = [];
  emitRuntime(classes);
  emitJunitDep(classes);
  const programs = emitProjects(classes);
  return { classes, programs };
}
