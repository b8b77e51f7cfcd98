import init, { Demo, sampleCorpus } from './pkg/zipfbpe_web.js';

const $ = (id) => document.getElementById(id);
let demo = null;

function setStatus(id, text, isError = false) {
  $(id).textContent = text;
  $(id).classList.toggle('error', isError);
}

// Lets the status line paint before a long synchronous call.
function later(fn) {
  return new Promise((resolve) => setTimeout(() => resolve(fn()), 20));
}

function blobUrl(text, type) {
  return URL.createObjectURL(new Blob([text], { type }));
}

function loadCorpus() {
  try {
    demo?.free();
    demo = new Demo($('corpus').value, $('mode').value);
    const info = JSON.parse(demo.corpusInfo());
    $('corpus-info').textContent =
      `mode ${info.mode}: ${info.total_pretokens} pre-tokens (${info.pretokens} distinct), ` +
      `${info.total_chars} characters, alphabet ${info.alphabet}, minimum vocabulary ${info.min_vocab}`;
    $('vocab-size').min = info.min_vocab;
    for (const id of ['train', 'select', 'encode']) $(id).disabled = false;
  } catch (e) {
    demo = null;
    $('corpus-info').textContent = String(e.message ?? e);
    for (const id of ['train', 'select', 'encode']) $(id).disabled = true;
  }
}

async function train() {
  setStatus('train-status', 'training...');
  try {
    const out = JSON.parse(await later(() => demo.train(Number($('vocab-size').value))));
    const fit = out.fit;
    const lines = [
      `vocabulary ${out.vocab_size}${out.exhausted ? ' (corpus ran out of pairs)' : ''}`,
      fit ? `R² ${fit.r_squared.toFixed(4)}  slope ${fit.slope.toFixed(3)}  points ${fit.n_points}` : 'too few tokens to fit',
      `compression ${out.compression_ratio.toFixed(3)} chars/token` +
        (out.fertility == null ? '' : `  fertility ${out.fertility.toFixed(3)} tokens/word`),
      'top: ' + out.top_tokens.map(([t, n]) => `${t} ${n}`).join(', '),
    ];
    $('train-stats').textContent = lines.join('\n');
    $('train-plot').innerHTML = out.svg;
    setStatus('train-status', '');
  } catch (e) {
    setStatus('train-status', String(e.message ?? e), true);
  }
}

async function select() {
  setStatus('select-status', 'running selector...');
  try {
    const out = JSON.parse(await later(() => demo.select(
      Number($('interval').value),
      Number($('epsilon').value),
      Number($('patience').value),
      Number($('v-max').value),
      $('best').checked,
    )));
    const best = out.trace[out.best_checkpoint];
    $('select-stats').textContent = [
      `stopped by ${out.stop_reason} after ${out.trace.length} checkpoints (first at ${out.v_min})`,
      `selected size ${out.selected_size}; best R² ${best.zipf_t.toFixed(4)} at ${best.vocab_size}`,
    ].join('\n');
    $('select-plot').innerHTML = out.svg;
    $('trace-link').href = blobUrl(out.trace_csv, 'text/csv');
    $('vocab-link').href = blobUrl(demo.vocabJson(), 'application/json');
    $('trace-link').hidden = $('vocab-link').hidden = false;
    setStatus('select-status', '');
  } catch (e) {
    setStatus('select-status', String(e.message ?? e), true);
  }
}

function encode() {
  try {
    const out = JSON.parse(demo.encode($('input').value));
    $('encode-stats').textContent =
      `${out.ids.length} tokens for ${out.chars} characters; decodes to: ${out.decoded}`;
    const box = $('tokens');
    box.replaceChildren(...out.tokens.map((token, i) => {
      const span = document.createElement('span');
      span.style.background = `hsl(${(out.ids[i] * 47) % 360} 70% 88%)`;
      span.textContent = token;
      const id = document.createElement('small');
      id.textContent = out.ids[i];
      span.append(id);
      return span;
    }));
  } catch (e) {
    $('encode-stats').textContent = String(e.message ?? e);
  }
}

await init();
$('sample-zipf').onclick = () => {
  $('corpus').value = sampleCorpus('zipf', 1);
  $('mode').value = 'text';
  loadCorpus();
};
$('sample-dna').onclick = () => {
  $('corpus').value = sampleCorpus('dna', 1);
  $('mode').value = 'sequence';
  loadCorpus();
};
$('file').onchange = async (ev) => {
  const file = ev.target.files[0];
  if (file) {
    $('corpus').value = await file.text();
    loadCorpus();
  }
};
$('load').onclick = loadCorpus;
$('train').onclick = train;
$('select').onclick = select;
$('encode').onclick = encode;
