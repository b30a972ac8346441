import { readFileSync, readdirSync } from 'node:fs';
import { join } from 'node:path';
import { describe, expect, it } from 'vitest';

import { graphToJson } from '../src/graph.js';
import { ParseFailure, extractSource, stripLiterals } from '../src/pyscan.js';

const FIXTURES = join(__dirname, '..', 'fixtures');
const GOLDEN = join(__dirname, '..', 'golden');

function extractFixture(name: string) {
  const source = readFileSync(join(FIXTURES, name), 'utf-8');
  return extractSource(source, name);
}

describe('fixture corpus extraction', () => {
  it('extracts the auth-manager class with 6 callables and 3 attributes', () => {
    const { graphs } = extractFixture('auth_manager.py');
    expect(graphs).toHaveLength(1);
    const graph = graphs[0].graph;
    expect(graph.class_name).toBe('AuthManager');
    expect(graph.nodes).toHaveLength(9);

    const kinds = new Map(graph.nodes.map((n) => [n.id, n.kind]));
    expect(kinds.get('__init__')).toBe('constructor');
    const callables = graph.nodes.filter((n) => n.kind !== 'attribute');
    const attributes = graph.nodes.filter((n) => n.kind === 'attribute');
    expect(callables.map((n) => n.id).sort()).toEqual(
      ['__init__', '_hash_password', '_log_event', 'is_authenticated', 'login', 'logout'],
    );
    expect(attributes.map((n) => n.id).sort()).toEqual(['_logger', 'session', 'user_store']);

    const edgeSet = new Set(graph.edges.map((e) => `${e.a}|${e.b}|${e.kind}`));
    expect(edgeSet.has('_hash_password|login|method_call')).toBe(true);
    expect(edgeSet.has('login|session|attribute_access')).toBe(true);
    expect(graphs[0].warnings).toEqual([]);
  });

  it('extracts the cache class members and the internal eviction call', () => {
    const { graphs } = extractFixture('in_memory_cache.py');
    const graph = graphs[0].graph;
    expect(graph.nodes.map((n) => n.id).sort()).toEqual(
      ['__init__', '_evict', '_max_items', '_store', 'clear', 'get', 'set'],
    );
    const edgeSet = new Set(graph.edges.map((e) => `${e.a}|${e.b}|${e.kind}`));
    expect(edgeSet.has('_evict|set|method_call')).toBe(true);
  });

  it('handles one-line method bodies', () => {
    const { graphs } = extractFixture('app_logger.py');
    const graph = graphs[0].graph;
    expect(graph.nodes.map((n) => n.id).sort()).toEqual(['__init__', '_logger', 'debug', 'error', 'info']);
    expect(graph.edges).toHaveLength(4);
    for (const method of ['debug', 'error', 'info']) {
      expect(graph.edges.some((e) => (e.a === '_logger' && e.b === method))).toBe(true);
    }
  });

  it('treats called attributes as attribute accesses, intra-class calls as method calls', () => {
    const { graphs } = extractFixture('user_repository.py');
    const edges = graphs[0].graph.edges;
    const byPair = new Map(edges.map((e) => [`${e.a}|${e.b}`, e.kind]));
    expect(byPair.get('get_user|verify')).toBe('method_call'); // self.get_user(...)
    expect(byPair.get('hasher|save_user')).toBe('attribute_access'); // self.hasher(...)
    expect(byPair.get('backend|save_user')).toBe('attribute_access'); // self.backend[k] = v
  });

  it('matches every committed golden file byte for byte', () => {
    const goldenFiles = readdirSync(GOLDEN).filter((f) => f.endsWith('.json') && f !== 'index.json');
    expect(goldenFiles).toHaveLength(6);
    const produced = new Map<string, string>();
    for (const fixture of readdirSync(FIXTURES).sort()) {
      for (const { graph } of extractFixture(fixture).graphs) {
        produced.set(`${graph.class_name}.json`, graphToJson(graph));
      }
    }
    for (const file of goldenFiles) {
      expect(produced.get(file), file).toBe(readFileSync(join(GOLDEN, file), 'utf-8'));
    }
  });

  it('is deterministic across repeated extraction', () => {
    for (const fixture of readdirSync(FIXTURES)) {
      const once = extractFixture(fixture).graphs.map(({ graph }) => graphToJson(graph));
      const twice = extractFixture(fixture).graphs.map(({ graph }) => graphToJson(graph));
      expect(once).toEqual(twice);
    }
  });
});

describe('scanner behavior', () => {
  it('ignores self references inside string literals and comments', () => {
    const source = [
      'class Sneaky:',
      '    def __init__(self):',
      '        self.real = 1',
      '        msg = "self.fake = 2"  # self.commented = 3',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'sneaky.py');
    const ids = graphs[0].graph.nodes.map((n) => n.id).sort();
    expect(ids).toEqual(['__init__', 'real']);
  });

  it('blanks triple-quoted docstrings', () => {
    const source = [
      'class Documented:',
      '    def work(self):',
      '        """uses self.ghost everywhere',
      '        self.ghost = 5',
      '        """',
      '        self.real = 1',
      '',
    ].join('\n');
    const stripped = stripLiterals(source, 'documented.py');
    expect(stripped).not.toContain('ghost');
    const { graphs } = extractSource(source, 'documented.py');
    expect(graphs[0].graph.nodes.map((n) => n.id).sort()).toEqual(['real', 'work']);
  });

  it('raises ParseFailure on an unterminated string', () => {
    expect(() => extractSource('class X:\n    def f(self):\n        s = "oops\n', 'broken.py')).toThrow(
      ParseFailure,
    );
  });

  it('joins multi-line def signatures', () => {
    const source = [
      'class Wide:',
      '    def configure(self,',
      '                  alpha,',
      '                  beta):',
      '        self.alpha = alpha',
      '        self.beta = beta',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'wide.py');
    expect(graphs[0].graph.nodes.map((n) => n.id).sort()).toEqual(['alpha', 'beta', 'configure']);
  });

  it('warns on unresolved self references instead of inventing nodes', () => {
    const source = [
      'class Partial:',
      '    def read(self):',
      '        return self.never_assigned',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'partial.py');
    expect(graphs[0].graph.nodes.map((n) => n.id)).toEqual(['read']);
    expect(graphs[0].warnings.some((w) => w.includes('never_assigned'))).toBe(true);
  });

  it('warns on decorators and class-level assignments, keeping the methods', () => {
    const source = [
      'class Flagged:',
      '    registry = {}',
      '    @staticmethod',
      '    def helper():',
      '        return 1',
      '    def __init__(self):',
      '        self.x = 2',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'flagged.py');
    const extraction = graphs[0];
    expect(extraction.graph.nodes.map((n) => n.id).sort()).toEqual(['__init__', 'helper', 'x']);
    expect(extraction.warnings.some((w) => w.includes('decorator'))).toBe(true);
    expect(extraction.warnings.some((w) => w.includes('registry'))).toBe(true);
  });

  it('skips self-recursive calls rather than emitting self-loops', () => {
    const source = [
      'class Rec:',
      '    def walk(self, n):',
      '        if n:',
      '            self.walk(n - 1)',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'rec.py');
    expect(graphs[0].graph.edges).toEqual([]);
    expect(graphs[0].warnings.some((w) => w.includes('self-recursive'))).toBe(true);
  });

  it('extracts several classes from one file', () => {
    const source = [
      'class First:',
      '    def __init__(self):',
      '        self.a = 1',
      '',
      'class Second:',
      '    def ping(self):',
      '        return self.pong()',
      '    def pong(self):',
      '        return 1',
      '',
    ].join('\n');
    const { graphs } = extractSource(source, 'two.py');
    expect(graphs.map((g) => g.graph.class_name)).toEqual(['First', 'Second']);
    expect(graphs[1].graph.edges).toEqual([{ a: 'ping', b: 'pong', kind: 'method_call' }]);
  });

  it('warns when a file defines no classes', () => {
    const result = extractSource('x = 1\n', 'plain.py');
    expect(result.graphs).toEqual([]);
    expect(result.warnings.some((w) => w.includes('no class definitions'))).toBe(true);
  });

  it('maps a constructor-only class to a single node with no edges', () => {
    const source = ['class Bare:', '    def __init__(self):', '        pass', ''].join('\n');
    const { graphs } = extractSource(source, 'bare.py');
    expect(graphs[0].graph.nodes).toEqual([{ id: '__init__', kind: 'constructor', label: '__init__' }]);
    expect(graphs[0].graph.edges).toEqual([]);
  });
});
