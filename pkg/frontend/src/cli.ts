/**
 * Subprocess plumbing for the omniwarp CLI.
 *
 * Every operation is a CLI invocation exchanging PNG files in a private
 * temp directory; exit codes are translated to typed errors matching the
 * CLI's documented contract (1 usage/validation, 2 I/O, 3 internal).
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class OmniwarpCliError extends Error {
  constructor(message: string, public readonly exitCode: number) {
    super(message);
  }
}
export class UsageError extends OmniwarpCliError {}
export class IoError extends OmniwarpCliError {}
export class InternalError extends OmniwarpCliError {}

export interface CliResult {
  stdout: string;
  stderr: string;
}

const PYTHON = process.env.OMNIWARP_PYTHON ?? "python3";

export function runCli(args: string[]): CliResult {
  const proc = spawnSync(PYTHON, ["-m", "omniwarp", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) {
    throw new IoError(`failed to launch ${PYTHON}: ${proc.error.message}`, 2);
  }
  if (proc.status !== 0) {
    const message = (proc.stderr || proc.stdout || "").trim() ||
      `omniwarp exited with code ${proc.status}`;
    switch (proc.status) {
      case 1: throw new UsageError(message, 1);
      case 2: throw new IoError(message, 2);
      default: throw new InternalError(message, proc.status ?? 3);
    }
  }
  return { stdout: proc.stdout, stderr: proc.stderr };
}

/** Run `fn` with a private temp directory that is always cleaned up. */
export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "omniwarp-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
