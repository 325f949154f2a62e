/**
 * Deterministic force-directed layout.
 *
 * A fixed-iteration spring/repulsion simulation seeded by a 32-bit PRNG:
 * the same graph and seed always produce identical coordinates, which
 * keeps snapshot tests stable.  Pinned nodes keep their given positions.
 */

export interface LayoutNode {
  id: string;
  pinned?: { x: number; y: number };
}

export interface LayoutEdge {
  source: string;
  target: string;
}

export interface Point {
  x: number;
  y: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  width: number,
  height: number,
  seed = 42,
  iterations = 150,
): Map<string, Point> {
  const rand = mulberry32(seed);
  const index = new Map(nodes.map((n, i) => [n.id, i]));
  const x = new Float64Array(nodes.length);
  const y = new Float64Array(nodes.length);
  nodes.forEach((node, i) => {
    if (node.pinned) {
      x[i] = node.pinned.x;
      y[i] = node.pinned.y;
    } else {
      x[i] = width * (0.2 + 0.6 * rand());
      y[i] = height * (0.2 + 0.6 * rand());
    }
  });

  const springLength = Math.min(width, height) / 4;
  for (let it = 0; it < iterations; it++) {
    const temperature = 0.1 * (1 - it / iterations) * Math.min(width, height);
    const fx = new Float64Array(nodes.length);
    const fy = new Float64Array(nodes.length);
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = x[i] - x[j];
        let dy = y[i] - y[j];
        let dist2 = dx * dx + dy * dy;
        if (dist2 < 1e-6) {
          dx = 0.01 * (i - j);
          dy = 0.01;
          dist2 = dx * dx + dy * dy;
        }
        const repulse = (springLength * springLength) / dist2;
        fx[i] += dx * repulse * 0.02;
        fy[i] += dy * repulse * 0.02;
        fx[j] -= dx * repulse * 0.02;
        fy[j] -= dy * repulse * 0.02;
      }
    }
    for (const edge of edges) {
      const i = index.get(edge.source);
      const j = index.get(edge.target);
      if (i === undefined || j === undefined || i === j) continue;
      const dx = x[j] - x[i];
      const dy = y[j] - y[i];
      const dist = Math.sqrt(dx * dx + dy * dy) || 1;
      const pull = 0.01 * (dist - springLength);
      fx[i] += (dx / dist) * pull * springLength;
      fy[i] += (dy / dist) * pull * springLength;
      fx[j] -= (dx / dist) * pull * springLength;
      fy[j] -= (dy / dist) * pull * springLength;
    }
    nodes.forEach((node, i) => {
      if (node.pinned) return;
      const step = Math.sqrt(fx[i] * fx[i] + fy[i] * fy[i]) || 1;
      const capped = Math.min(step, temperature);
      x[i] += (fx[i] / step) * capped;
      y[i] += (fy[i] / step) * capped;
      x[i] = Math.max(20, Math.min(width - 20, x[i]));
      y[i] = Math.max(20, Math.min(height - 20, y[i]));
    });
  }

  const out = new Map<string, Point>();
  nodes.forEach((node, i) => {
    out.set(node.id, { x: Math.round(x[i] * 100) / 100, y: Math.round(y[i] * 100) / 100 });
  });
  return out;
}
