// CLI: <kind> <input.csv...> <output.svg> with kind one of
// strategies | blocksizes | accuracy.  Inputs are never modified; the output
// is only written when rendering succeeded.

import { readFileSync, writeFileSync } from 'node:fs';
import { plotAccuracy, plotConvergence } from './plots';

export function run(argv: string[]): number {
    if (argv.length < 3) {
        console.error('usage: main.js <strategies|blocksizes|accuracy> <input.csv...> <output.svg>');
        return 1;
    }
    const kind = argv[0];
    const inputs = argv.slice(1, -1);
    const output = argv[argv.length - 1];
    try {
        const texts = inputs.map((p) => readFileSync(p, 'utf8'));
        const joined = texts.length === 1 ? texts[0] : mergeCsv(texts);
        let svg: string;
        if (kind === 'strategies' || kind === 'blocksizes') {
            svg = plotConvergence(joined, kind);
        } else if (kind === 'accuracy') {
            svg = plotAccuracy(joined);
        } else {
            console.error(`unknown figure kind: ${kind}`);
            return 1;
        }
        writeFileSync(output, svg);
        console.log(`wrote ${output}`);
        return 0;
    } catch (err) {
        console.error(String(err));
        return 1;
    }
}

// concatenate CSVs that share a header: keep the first header, drop repeats
function mergeCsv(texts: string[]): string {
    const all: string[] = [];
    let header: string | null = null;
    for (const text of texts) {
        for (const ln of text.split(/\r?\n/)) {
            const t = ln.trim();
            if (!t || t.startsWith('#')) {
                continue;
            }
            if (header === null) {
                header = t;
                all.push(t);
            } else if (t === header) {
                continue;
            } else {
                all.push(t);
            }
        }
    }
    return all.join('\n') + '\n';
}

if (require.main === module) {
    process.exit(run(process.argv.slice(2)));
}
