import argparse
import os

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

# Use non-interactive backend
plt.switch_backend('Agg')

COLORS = ['red', 'green', 'orange', 'blue', 'purple', 'brown']


def plot_ladders(csv_path='certificates/q_ladder.csv', output_dir='plots'):
    """Render a Q ladder CSV (n, alpha, q_normalized, target, deviation) to PNG."""
    if not os.path.exists(csv_path):
        print(f"Error: {csv_path} not found.")
        return None

    frame = pd.read_csv(csv_path)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(10, 10), sharex=True)
    plt.subplots_adjust(hspace=0.3)

    # 1. Q/n^4 against the limiting value
    for i, (alpha, rows) in enumerate(frame.groupby('alpha', sort=False)):
        rows = rows.sort_values('n')
        color = COLORS[i % len(COLORS)]
        ax1.plot(rows['n'], rows['q_normalized'], marker='o', color=color, label=f'alpha={alpha}')
        ax1.axhline(rows['target'].iloc[0], color=color, linestyle='--', alpha=0.6)
    ax1.set_title('Q(G_alpha(n)) / n^4 (dashed: (3 - alpha + alpha^2)/81)', fontsize=14)
    ax1.set_ylabel('Q / n^4')
    ax1.grid(True, linestyle='--', alpha=0.7)
    ax1.legend()

    # 2. Deviation from the limit; exact ladders sit on the zero line
    for i, (alpha, rows) in enumerate(frame.groupby('alpha', sort=False)):
        rows = rows.sort_values('n')
        ax2.plot(rows['n'], np.abs(rows['deviation']), marker='s',
                 color=COLORS[i % len(COLORS)], label=f'alpha={alpha}')
    if (frame['deviation'] != 0).any():
        ax2.set_yscale('symlog', linthresh=1e-12)
    ax2.set_title('|Q / n^4 - limit|', fontsize=14)
    ax2.set_ylabel('Absolute deviation')
    ax2.set_xlabel('n')
    ax2.grid(True, linestyle='--', alpha=0.7)
    ax2.legend()

    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, 'q_ladder.png')
    plt.savefig(path, dpi=300, bbox_inches='tight')
    plt.close(fig)

    print(f"Ladder plot saved to {path}")
    return path


def main(argv=None):
    parser = argparse.ArgumentParser(description='Plot Q ladders written by certify.py')
    parser.add_argument('--csv', default='certificates/q_ladder.csv', help='Ladder CSV file')
    parser.add_argument('--output-dir', default='plots', help='Directory for the PNG')
    args = parser.parse_args(argv)
    return 0 if plot_ladders(args.csv, args.output_dir) else 1


if __name__ == '__main__':
    raise SystemExit(main())
