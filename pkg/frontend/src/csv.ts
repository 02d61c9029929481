// CSV ingestion for the benchmark file schemas.  Lines starting with '#'
// are generator comments (the timestamp header) and are skipped.

export interface TraceRow {
    experiment: string;
    caseId: string;
    cycle: number;
    offNorm: number;
    offRel: number;
}

export interface AccuracyRow {
    caseId: string;
    blockSize: number;
    eigIndex: number;
    relErr: number;
}

export const TRACE_HEADER = 'experiment,case_id,cycle,off_norm,off_rel';
export const ACCURACY_HEADER =
    'case_id,block_size,eig_index,lambda_oracle_re,lambda_oracle_im,lambda_est_re,lambda_est_im,rel_err';

export class CsvSchemaError extends Error {}

function dataLines(text: string): string[] {
    return text
        .split(/\r?\n/)
        .map((ln) => ln.trim())
        .filter((ln) => ln.length > 0 && !ln.startsWith('#'));
}

function checkHeader(lines: string[], expected: string): string[] {
    if (lines.length === 0) {
        throw new CsvSchemaError('empty CSV: no header line');
    }
    if (lines[0] !== expected) {
        throw new CsvSchemaError(`unexpected header: "${lines[0]}" (expected "${expected}")`);
    }
    const body = lines.slice(1);
    if (body.length === 0) {
        throw new CsvSchemaError('empty CSV: header but no data rows');
    }
    return body;
}

function toNumber(tok: string, line: string): number {
    const v = Number(tok);
    if (!Number.isFinite(v)) {
        throw new CsvSchemaError(`non-numeric field "${tok}" in row: ${line}`);
    }
    return v;
}

export function parseTraceCsv(text: string): TraceRow[] {
    const body = checkHeader(dataLines(text), TRACE_HEADER);
    return body.map((line) => {
        const parts = line.split(',');
        if (parts.length !== 5) {
            throw new CsvSchemaError(`expected 5 fields, got ${parts.length}: ${line}`);
        }
        return {
            experiment: parts[0],
            caseId: parts[1],
            cycle: toNumber(parts[2], line),
            offNorm: toNumber(parts[3], line),
            offRel: toNumber(parts[4], line),
        };
    });
}

export function parseAccuracyCsv(text: string): AccuracyRow[] {
    const body = checkHeader(dataLines(text), ACCURACY_HEADER);
    return body.map((line) => {
        const parts = line.split(',');
        if (parts.length !== 8) {
            throw new CsvSchemaError(`expected 8 fields, got ${parts.length}: ${line}`);
        }
        return {
            caseId: parts[0],
            blockSize: toNumber(parts[1], line),
            eigIndex: toNumber(parts[2], line),
            relErr: toNumber(parts[7], line),
        };
    });
}
