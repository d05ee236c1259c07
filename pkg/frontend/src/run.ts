import { spawnSync } from 'node:child_process';

export class TleakError extends Error {
    constructor(message: string) {
        super(message);
        this.name = new.target.name;
    }
}

/** Unusable input: unreadable or malformed files, bad options (exit code 2). */
export class TleakInputError extends TleakError {}

/** The data cannot support the requested statistic (exit code 3). */
export class TleakDataError extends TleakError {}

function tleakBin(): string {
    return process.env.TLEAK_BIN ?? 'tleak';
}

export function runTleak(args: string[]): void {
    const res = spawnSync(tleakBin(), args, { encoding: 'utf-8' });
    if (res.error) {
        throw new TleakError(`could not launch ${tleakBin()}: ${res.error.message}`);
    }
    if (res.status === 0) {
        return;
    }
    const message = coreMessage(res.stderr ?? '');
    if (res.status === 3) {
        throw new TleakDataError(message);
    }
    throw new TleakInputError(message);
}

// The CLI prefixes its own diagnostics with "tleak: "; surface that line
// verbatim so callers see the core wording.
function coreMessage(stderr: string): string {
    const lines = stderr.trim().split('\n');
    for (let i = lines.length - 1; i >= 0; i--) {
        if (lines[i].startsWith('tleak: ')) {
            return lines[i].slice('tleak: '.length);
        }
    }
    return lines.join('\n') || 'tleak exited with an error';
}
