// Produces a pre-tagged corpus (surface<TAB>lemma<TAB>POS, blank line between
// sentences) from a Project Gutenberg plain-text file.
//
//   npm install wink-nlp wink-eng-lite-web-model
//   node pretag.js <book.txt> > book.tsv
const fs = require('fs');
const winkNLP = require('wink-nlp');
const model = require('wink-eng-lite-web-model');

const raw = fs.readFileSync(process.argv[2], 'utf8').replace(/\r\n/g, '\n');
const start = raw.search(/^\*\*\* ?START OF TH/m);
const end = raw.search(/^\*\*\* ?END OF TH/m);
let body = raw.slice(raw.indexOf('\n', start) + 1, end < 0 ? raw.length : end);
// Underscores mark italics in PG texts.
body = body.replace(/_/g, '');

const nlp = winkNLP(model);
const its = nlp.its;
const out = [];
// Paragraph-wise so that headings never glue onto sentences.
for (const para of body.split(/\n\s*\n/)) {
  const text = para.replace(/\s+/g, ' ').trim();
  if (!text) continue;
  nlp.readDoc(text).sentences().each((s) => {
    const lines = [];
    s.tokens().each((t) => {
      const type = t.out(its.type);
      if (type === 'tabCRLF') return;
      const surface = t.out();
      if (!surface.trim()) return;
      const lemma = (t.out(its.lemma) || surface).toLowerCase();
      lines.push(`${surface}\t${lemma}\t${t.out(its.pos)}`);
    });
    if (lines.length) out.push(lines.join('\n'));
  });
}
process.stdout.write(out.join('\n\n') + '\n');
