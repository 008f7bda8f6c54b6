import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import argparse
import os
from csfml.utils.logger import DataLog


def make_log_plots(log=None,
                   log_path=None,
                   keys=None,
                   save_loc=None,
                   x_key='fold'):
    if log is None and log_path is None:
        print("Need to provide either the log or path to a log file")
        return []
    if log is None:
        logger = DataLog()
        logger.read_log(log_path)
        log = logger.log
    saved = []
    # one plot per requested key, against x_key when it was logged
    for key in keys:
        if key not in log.keys():
            continue
        values = [np.nan if v is None else v for v in log[key]]
        fig = plt.figure(figsize=(10, 6))
        ax1 = fig.add_subplot(111)
        if x_key in log.keys() and len(log[x_key]) == len(values):
            ax1.plot(log[x_key], values, marker='o')
            ax1.set_xlabel(x_key)
        else:
            ax1.plot(values, marker='o')
            ax1.set_xlabel('iterations')
        ax1.set_title(key)
        path = os.path.join(save_loc, key + '.png')
        plt.savefig(path, dpi=100)
        plt.close(fig)
        saved.append(path)
    return saved


def plot_roc(curves, save_loc, aucs=None, file_name='roc.png'):
    """:param curves: dict class name -> RocCurve"""
    aucs = {} if aucs is None else aucs
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(111)
    for name, curve in curves.items():
        label = name if aucs.get(name) is None else '%s (AUC %.2f)' % (name, aucs[name])
        ax.plot(curve.fpr, curve.tpr, drawstyle='default', label=label)
    ax.plot([0, 1], [0, 1], linestyle='--', color=(.7, .7, .7))
    ax.set_xlabel('false positive rate')
    ax.set_ylabel('true positive rate')
    ax.set_xlim([0, 1])
    ax.set_ylim([0, 1])
    ax.legend(loc='lower right')
    path = os.path.join(save_loc, file_name)
    plt.savefig(path, dpi=100)
    plt.close(fig)
    return path


def plot_confusion(cm, save_loc, file_name='confusion.png'):
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(111)
    image = ax.imshow(cm.counts, cmap='Blues')
    fig.colorbar(image, ax=ax)
    K = len(cm.class_names)
    ax.set_xticks(range(K))
    ax.set_yticks(range(K))
    ax.set_xticklabels(cm.class_names)
    ax.set_yticklabels(cm.class_names)
    ax.set_xlabel('predicted class')
    ax.set_ylabel('true class')
    threshold = cm.counts.max() / 2.0
    for i in range(K):
        for j in range(K):
            ax.text(j, i, str(cm.counts[i, j]), ha='center', va='center',
                    color='white' if cm.counts[i, j] > threshold else 'black')
    path = os.path.join(save_loc, file_name)
    plt.savefig(path, dpi=100, bbox_inches='tight')
    plt.close(fig)
    return path


def plot_compare_metrics(results, save_loc, file_name='compare_metrics.png'):
    """
    Grouped bars of accuracy and per-class TPR / FNR / PPV / FDR for every model.
    :param results: list of (model token, MetricsReport)
    """
    rates = ['tpr', 'fnr', 'ppv', 'fdr']
    class_names = [c.name for c in results[0][1].per_class]
    fig, axes = plt.subplots(1, len(rates) + 1, figsize=(4 * (len(rates) + 1), 5), sharey=True)
    models = [model for model, _ in results]
    x = np.arange(len(models))
    axes[0].bar(x, [report.accuracy for _, report in results], color=(.3, .5, .8))
    axes[0].set_title('accuracy')
    width = 0.8 / len(class_names)
    for ax, rate in zip(axes[1:], rates):
        for c, name in enumerate(class_names):
            values = [getattr(report.per_class[c], rate) for _, report in results]
            values = [np.nan if v is None else v for v in values]
            ax.bar(x + (c - (len(class_names) - 1) / 2.0) * width, values, width, label=name)
        ax.set_title(rate.upper())
    for ax in axes:
        ax.set_xticks(x)
        ax.set_xticklabels(models, rotation=60, ha='right')
        ax.set_ylim([0, 1])
    axes[-1].legend()
    path = os.path.join(save_loc, file_name)
    plt.savefig(path, dpi=100, bbox_inches='tight')
    plt.close(fig)
    return path


# MAIN =========================================================
# Example: python make_result_plots.py --log_path results/log.csv --keys fold_accuracy --save_loc results
def main():
    # Parse arguments
    parser = argparse.ArgumentParser()
    parser.add_argument(
        '-l', '--log_path', type=str, required=True, help='path file to log.csv')
    parser.add_argument(
        '-k', '--keys', type=str, action='append', nargs='+', required=True, help='keys to plot')
    parser.add_argument(
        '-s', '--save_loc', type=str, default='.', help='Path for plots')
    parser.add_argument(
        '-x', '--x_key', type=str, default='fold', help='key for the x axis')
    args = parser.parse_args()

    make_log_plots(log_path=args.log_path, keys=args.keys[0], save_loc=args.save_loc, x_key=args.x_key)


if __name__ == '__main__':
    main()
