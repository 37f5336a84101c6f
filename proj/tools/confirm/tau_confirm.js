// Runs both fixture sets through tau-prolog and prints the first-answer
// outcome of each query. date/3 is declared dynamic because the engine lets
// assert and retract modify any predicate; ISO systems refuse for static ones.
// Usage: NODE_PATH=<dir>/node_modules node tools/confirm/tau_confirm.js
const pl = require("tau-prolog");
const path = require("path");
const fs = require("fs");
const root = path.join(__dirname, "..", "..", "fixtures") + "/";
function run(program, goal) {
  return new Promise((resolve) => {
    const s = pl.create(1000000);
    s.consult(program, {
      success: () => {
        s.query(goal, {
          success: () => s.answer({
            success: () => resolve("yes"),
            fail: () => resolve("no"),
            error: (e) => resolve("error: " + pl.format_answer(e)),
            limit: () => resolve("limit"),
          }),
          error: (e) => resolve("query error: " + pl.format_answer(e)),
        });
      },
      error: (e) => resolve("consult error: " + pl.format_answer(e)),
    });
  });
}
(async () => {
  for (const set of ["o1", "4o"]) {
    const policy = fs.readFileSync(root + set + "/policy.pl", "utf8");
    const out = [];
    for (let q = 1; q <= 9; q++) {
      const text = fs.readFileSync(root + set + "/queries/q" + q + ".pl", "utf8");
      let prelude, goal;
      const idx = text.lastIndexOf("?-");
      if (idx >= 0) {
        prelude = text.slice(0, idx);
        goal = text.slice(idx + 2).trim();
      } else {
        const body = text.trim();
        const cut = body.lastIndexOf(".", body.length - 2);
        prelude = cut >= 0 ? body.slice(0, cut + 1) : "";
        goal = body.slice(cut + 1).trim();
      }
      out.push(await run(":- op(1150, fx, dynamic).\nassert(X) :- assertz(X).\n:- dynamic date/3.\n" + policy + "\n" + prelude, goal));
    }
    console.log(set + ": " + out.join(", "));
  }
})();
