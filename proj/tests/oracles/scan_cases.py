# Emits scan_cases.json: script bodies for the declaration oracle.
import json

cases = [
    "function a() {}",
    "function a() {}\nfunction b() {}",
    "async function go() {}",
    "function* gen() { yield 1; }",
    "async function* stream() {}",
    "var f = function g() {};",
    "const h = () => { function inner() {} };",
    "(function iife() { function hidden() {} })();",
    "!function bang() {}();",
    "let x = 1\nfunction afterNumber() {}",
    "let y = a\nfunction afterIdent() {}",
    "let s = 'x'\nfunction afterString() {}",
    "let t = `x`\nfunction afterTemplate() {}",
    "call()\nfunction afterParen() {}",
    "arr[0]\nfunction afterBracket() {}",
    "const o = x ||\nfunction p() {};",
    "const k = (\nfunction m() {});",
    "// function commented() {}\nfunction real() {}",
    "/* function blocked() {} */ function real2() {}",
    "const s = \"function quoted() {}\"; function q1() {}",
    "const s = 'function single() {}'; function q2() {}",
    "const t = `${ function inTemplate() {} }`; function q3() {}",
    "const t = `a ${ `b ${ function deep() {} }` } c`; function q4() {}",
    "const r = /function inRegex() {}/; function q5() {}",
    "const r = /[/]function x(){}/g; function q6() {}",
    "if (ok) { function blockScoped() {} }\nfunction top() {}",
    "{ function inBlock() {} }\nfunction outer() {}",
    "class Widget { method() { function notTop() {} } }\nfunction afterClass() {}",
    "const obj = { fn: function named() {}, other() {} };\nfunction z() {}",
    "x = a / b / c; function afterDivision() {}",
    "const re = x.split(/}/); function afterRegexBrace() {}",
    "setTimeout(function cb() {}, 10);\nfunction after() {}",
    "function outer2() { function nested() {} return nested; }",
    "function dup() {}\nfunction dup() {}",
    "function onConnected() {}\nfunction onDisconnected() {}",
    "function $dollar() {}\nfunction _under() {}",
    "function café() {}",
    "return_ = 1;\nfunction r2() {}",
    "for (let i = 0; i < 3; i++) { function loopFn() {} }\nfunction afterFor() {}",
    "while (false) x++\nfunction afterWhile() {}",
    "switch (v) { case 1: function inCase() {} }\nfunction afterSwitch() {}",
    "try { function inTry() {} } catch (e) {}\nfunction afterTry() {}",
    "const a1 = [function inArray() {}];\nfunction afterArray() {}",
    "x = typeof function t1() {};\nfunction afterTypeof() {}",
    "x = void function t2() {};\nfunction afterVoid() {}",
    "label: for (;;) { break label; }\nfunction afterLabel() {}",
    "const d = a ? function c1() {} : function c2() {};\nfunction afterTernary() {}",
    "let n = 1 /* multi\nline */ function afterBlockComment() {}",
    "const str = 'a\\'b'; function afterEscape() {}",
    "export_ = {}; ; ; function afterSemis() {}",
    "i--\nfunction afterDecrement() {}",
    "let k = 0\nk\n++k\nfunction afterPrefix() {}",
    "const m = a + ++b\nfunction afterUnaryPlus() {}",
    "arr[i]++\nfunction afterIndexPostfix() {}",
]

json.dump(cases, open("scan_cases.json", "w"), indent=1, ensure_ascii=False)
print(len(cases))
