#!/usr/bin/env node
/**
 * seer-extract <paths...> --out <dir> [--strict|--lenient] [--keywords cfg.json]
 * seer-extract --trace <file> [--keywords cfg.json]
 *
 * Extraction mode scans .py files (directories recurse) and writes one
 * graph-interchange JSON per class plus an index file. Trace mode converts
 * call-trace lines to raw triads on stdout. Warnings go to stderr; exit
 * code is 0 iff nothing failed.
 */

import { mkdirSync, readFileSync, readdirSync, statSync, writeFileSync } from 'node:fs';
import { basename, join } from 'node:path';

import { graphToJson } from './graph.js';
import { ParseFailure, extractSource } from './pyscan.js';
import { DEFAULT_KEYWORDS, KeywordTable, SymbolSpaceExhausted, TraceFormatError, loadKeywordTable, traceToTriads } from './trace.js';

interface Args {
  paths: string[];
  out: string | null;
  strict: boolean;
  keywords: string | null;
  trace: string | null;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { paths: [], out: null, strict: true, keywords: null, trace: null };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '--out') args.out = argv[++i];
    else if (arg === '--strict') args.strict = true;
    else if (arg === '--lenient') args.strict = false;
    else if (arg === '--keywords') args.keywords = argv[++i];
    else if (arg === '--trace') args.trace = argv[++i];
    else if (arg.startsWith('--')) throw new Error(`unknown flag ${arg}`);
    else args.paths.push(arg);
  }
  return args;
}

function collectPythonFiles(path: string): string[] {
  const stats = statSync(path);
  if (stats.isFile()) return path.endsWith('.py') ? [path] : [];
  const found: string[] = [];
  for (const entry of readdirSync(path).sort()) {
    found.push(...collectPythonFiles(join(path, entry)));
  }
  return found;
}

interface IndexEntry {
  class_name: string;
  source_file: string;
  graph_file: string;
  nodes: number;
  edges: number;
  warnings: string[];
}

export function runExtract(args: Args, stderr: (line: string) => void): number {
  if (!args.out) throw new Error('--out <dir> is required');
  const files = args.paths.flatMap(collectPythonFiles).sort();
  if (files.length === 0) throw new Error('no .py files found under the given paths');
  mkdirSync(args.out, { recursive: true });

  const index: IndexEntry[] = [];
  let failed = false;
  for (const file of files) {
    let source: string;
    try {
      source = readFileSync(file, 'utf-8');
    } catch (err) {
      stderr(`warning: ${file}: unreadable (${(err as Error).message})`);
      failed = failed || args.strict;
      continue;
    }
    try {
      const result = extractSource(source, basename(file));
      for (const warning of result.warnings) stderr(`warning: ${warning}`);
      for (const { graph, warnings } of result.graphs) {
        for (const warning of warnings) stderr(`warning: ${warning}`);
        const graphFile = `${graph.class_name}.json`;
        writeFileSync(join(args.out, graphFile), graphToJson(graph));
        index.push({
          class_name: graph.class_name,
          source_file: file,
          graph_file: graphFile,
          nodes: graph.nodes.length,
          edges: graph.edges.length,
          warnings,
        });
      }
    } catch (err) {
      if (err instanceof ParseFailure) {
        if (args.strict) {
          stderr(`error: ${file}: ${err.message}`);
          failed = true;
        } else {
          stderr(`warning: ${file}: skipped (${err.message})`);
        }
        continue;
      }
      throw err;
    }
  }

  index.sort((a, b) => (a.class_name < b.class_name ? -1 : a.class_name > b.class_name ? 1 : 0));
  writeFileSync(join(args.out, 'index.json'), JSON.stringify(index, null, 2) + '\n');
  return failed ? 1 : 0;
}

export function runTrace(args: Args, stdout: (text: string) => void): number {
  const keywords: KeywordTable = args.keywords ? loadKeywordTable(args.keywords) : DEFAULT_KEYWORDS;
  const text = readFileSync(args.trace as string, 'utf-8');
  const triads = traceToTriads(text, keywords);
  stdout(JSON.stringify(triads) + '\n');
  return 0;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (args.trace) return runTrace(args, (t) => process.stdout.write(t));
    return runExtract(args, (line) => process.stderr.write(line + '\n'));
  } catch (err) {
    if (err instanceof TraceFormatError || err instanceof SymbolSpaceExhausted || err instanceof Error) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('seer-extract')) {
  process.exit(main(process.argv.slice(2)));
}
