"""
语料审计工具主程序
以子命令形式提供去重、近重复检测、标签冲突、数据划分、泄漏检测和审计报告
"""

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

# 添加项目根目录到路径
sys.path.append(str(Path(__file__).parent))

from core.exact_dedup import ExactDeduplicator
from core.label_conflicts import LabelConflictResolver
from core.near_dedup import MODES, PREFILTERS, NearDuplicateDetector
from core.normalizer import KeyMode, normalize_text
from core.split_leakage import (LEAKAGE_MODES, LeakageDetector, leave_one_out_split, random_split,
                                save_split, MANIFEST_NAME)
from data_structures.corpus import Corpus, Language
from data_structures.results import Split, write_jsonl, write_pairs_csv
from evaluation.audit_report import CorpusAuditor
from evaluation.error_analysis import contamination_in_errors, load_predictions
from evaluation.rank_comparison import compare_rankings, load_scores
from evaluation.report_renderer import render_conflict_table, render_report
from utils.config_manager import REPORT_FORMATS, ConfigManager, RunConfig, run_config_name
from utils.corpus_io import SUPPORTED_FORMATS, filter_short, load_corpus, write_corpus
from utils.exceptions import (EXIT_INTERNAL_ERROR, EXIT_OK, CorpusWriteError, OutputExistsError,
                              UsageError, get_exception_handler)
from utils.logger import get_global_logger, setup_global_logger
from utils.performance_monitor import PerformanceMonitor
from version import __version__, print_version_info


REPORT_EXTENSIONS = {'json': "json", 'csv': "csv", 'markdown': "md"}


class AuditArgumentParser(argparse.ArgumentParser):
    """用法错误抛出 UsageError，由 run() 统一映射为退出码 1"""

    def error(self, message: str):
        raise UsageError(message)


class OutputDirectory:
    """输出目录；写入前统一检查所有目标文件，未指定 --force 时不覆盖"""

    def __init__(self, directory: str, force: bool):
        self.directory = Path(directory)
        self.force = force

    def plan(self, names: Sequence[str]) -> Dict[str, Path]:
        paths = {name: self.directory / name for name in names}
        if not self.force:
            for path in paths.values():
                if path.exists():
                    raise OutputExistsError(str(path))
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CorpusWriteError(str(self.directory), str(e)) from e
        return paths


def _write_text(path: Path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise CorpusWriteError(str(path), str(e)) from e


def _write_json(path: Path, data: Any):
    _write_text(path, json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def _colour(text: str, code: str) -> str:
    """NO_COLOR 已设置或 stderr 不是终端时不加颜色"""
    if "NO_COLOR" in os.environ or not sys.stderr.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def _notify(message: str):
    print(_colour(message, "32"), file=sys.stderr)


class AuditCommands:
    """子命令实现；每个命令先规划输出文件，再计算和写出"""

    def __init__(self, config: RunConfig, args: argparse.Namespace, manager: ConfigManager):
        self.config = config
        self.args = args
        self.manager = manager
        self.outputs = OutputDirectory(config.output.directory, config.output.force)
        self.monitor = PerformanceMonitor()
        self.logger = get_global_logger()

    # ---- 公共步骤 ----

    def load(self, path: str) -> Corpus:
        """加载语料并按 min_tokens 过滤"""
        corpus = load_corpus(path, self.config.input.format, self.config.input.mapping(),
                             Language.parse(self.config.input.language))
        if self.config.input.min_tokens is not None:
            before = len(corpus)
            corpus = filter_short(corpus, self.config.input.filter_config())
            self.logger.log_stage(f"短帖过滤(< {self.config.input.min_tokens} 词)", len(corpus),
                                  before - len(corpus))
        return corpus

    def corpus_name(self, path: str, suffix: str) -> str:
        return f"{Path(path).stem}.{suffix}.{self.config.output.corpus_format}"

    @property
    def run_config_name(self) -> str:
        command = self.config.command
        if command == "leak-check":
            command = f"{command}_{self.args.mode}"
        return run_config_name(Path(self.config.input.paths[0]).stem, command)

    def plan(self, names: List[str]) -> Dict[str, Path]:
        return self.outputs.plan(names + [self.run_config_name])

    def finish(self, paths: Dict[str, Path]) -> int:
        self.manager.save(self.config, paths[self.run_config_name], force=True)
        _notify(f"✔ {self.config.command}: 输出已写入 {self.outputs.directory}")
        return EXIT_OK

    def write_corpus(self, corpus: Corpus, path: Path):
        write_corpus(corpus, path, self.config.output.corpus_format, force=True)

    def report_names(self, stem: str) -> List[str]:
        return [f"{stem}.{REPORT_EXTENSIONS[fmt]}" for fmt in self.config.output.report_formats]

    def write_reports(self, stem: str, report, paths: Dict[str, Path]):
        for fmt in self.config.output.report_formats:
            _write_text(paths[f"{stem}.{REPORT_EXTENSIONS[fmt]}"], render_report(report, fmt))

    @property
    def workers(self) -> int:
        return self.config.performance.workers

    # ---- 子命令 ----

    def audit(self) -> int:
        paths = self.plan(self.report_names("audit_report"))
        auditor = CorpusAuditor(self.config.normalization, self.config.near_dup, self.workers,
                                self.config.performance.chunk_size)

        reports = []
        for path in self.config.input.paths:
            corpus = self.load(path)
            with self.monitor.measure(f"审计 {Path(path).name}", len(corpus)):
                reports.append(auditor.audit(corpus, name=Path(path).name))

        self.write_reports("audit_report", reports, paths)
        sys.stdout.write(render_report(reports, "markdown"))
        return self.finish(paths)

    def dedup(self) -> int:
        source = self.config.input.paths[0]
        kept_name = self.corpus_name(source, "dedup")
        removed_name = self.corpus_name(source, "dedup_removed")
        paths = self.plan([kept_name, removed_name])

        corpus = self.load(source)
        deduplicator = ExactDeduplicator(KeyMode(self.args.key_mode), self.config.normalization)
        output, removed = deduplicator.deduplicate(corpus)

        self.write_corpus(output, paths[kept_name])
        self.write_corpus(corpus.derive(removed), paths[removed_name])
        _notify(f"精确去重({self.args.key_mode}): 保留 {len(output)}, 移除 {len(removed)}")
        return self.finish(paths)

    def near_dedup(self) -> int:
        source = self.config.input.paths[0]
        stem = Path(source).stem
        kept_name = self.corpus_name(source, "neardedup")
        removed_name = self.corpus_name(source, "neardedup_removed")
        pairs_name, clusters_name = f"{stem}.pairs.csv", f"{stem}.clusters.jsonl"
        paths = self.plan([kept_name, removed_name, pairs_name, clusters_name])

        corpus = self.load(source)
        detector = NearDuplicateDetector(self.config.near_dup, self.config.normalization, self.workers,
                                         self.config.performance.chunk_size)
        with self.monitor.measure("近重复检测", len(corpus)):
            pairs, clusters = detector.find_near_duplicates(corpus)
        output, removed = detector.keep_representatives(corpus, clusters)

        self.write_corpus(output, paths[kept_name])
        self.write_corpus(corpus.derive(removed), paths[removed_name])
        write_pairs_csv(pairs, paths[pairs_name])
        write_jsonl(clusters.to_dicts(), paths[clusters_name])
        if clusters.approximate:
            self.logger.warning("近重复结果为近似结果（启用了 MinHash 预筛选）")
        _notify(f"近重复: 对 {len(pairs)}, 簇 {len(clusters)}, 移除 {len(removed)}")
        return self.finish(paths)

    def conflicts(self) -> int:
        source = self.config.input.paths[0]
        stem = Path(source).stem
        names = [f"{stem}.conflicts.jsonl", f"{stem}.conflicts.md"]
        if self.args.resolve:
            names += [self.corpus_name(source, "resolved"), self.corpus_name(source, "resolved_removed")]
        paths = self.plan(names)

        corpus = self.load(source)
        clusters = ExactDeduplicator(KeyMode.NORMALIZED, self.config.normalization).build_clusters(corpus)
        resolver = LabelConflictResolver()
        reports = resolver.find_conflicts(clusters)

        write_jsonl([report.to_dict() for report in reports], paths[names[0]])
        _write_text(paths[names[1]], render_conflict_table(reports))
        if self.args.resolve:
            output, removed = resolver.resolve_conflicts(corpus, clusters)
            self.write_corpus(output, paths[names[2]])
            self.write_corpus(corpus.derive(removed), paths[names[3]])
        _notify(f"标签冲突: 重复簇 {sum(1 for c in clusters if c.is_duplicate)}, 冲突簇 {len(reports)}")
        return self.finish(paths)

    def split(self) -> int:
        source = self.config.input.paths[0]
        stem = Path(source).stem
        fmt = self.config.output.corpus_format
        corpus = self.load(source)

        if self.config.split.strategy == "random":
            splits = [(f"{stem}.", random_split(corpus, self.config.split.ratio, self.config.split.seed))]
        else:
            splits = [(f"{stem}.fold{k}.", split) for k, split in enumerate(leave_one_out_split(corpus), start=1)]

        names = [f"{prefix}{part}" for prefix, _ in splits
                 for part in (f"train.{fmt}", f"test.{fmt}", MANIFEST_NAME)]
        paths = self.plan(names)
        for prefix, split in splits:
            save_split(split, self.outputs.directory, fmt, force=True, prefix=prefix)
        _notify(f"数据划分({self.config.split.strategy}): {len(splits)} 组")
        return self.finish(paths)

    def leak_check(self) -> int:
        train_path, test_path = self.config.input.paths
        mode = self.args.mode
        names = [f"leakage_{mode}.json"]
        if self.args.scrub:
            names.append(self.corpus_name(train_path, f"scrubbed_{mode}"))
        if self.args.mark_test:
            names.append(f"test_marks_{mode}.json")
        if self.args.predictions:
            names.append(f"error_analysis_{mode}.json")
        paths = self.plan(names)

        split = Split(self.load(train_path), self.load(test_path), strategy="given")
        detector = LeakageDetector(self.config.near_dup, self.config.normalization, self.workers,
                                   self.config.performance.chunk_size)
        report = detector.detect_leakage(split, mode)
        _write_json(paths[names[0]], report.to_dict())

        if self.args.scrub:
            scrubbed = detector.scrub_train(split, mode)
            self.write_corpus(scrubbed.train, paths[self.corpus_name(train_path, f"scrubbed_{mode}")])
        if self.args.mark_test:
            marks = detector.mark_test_contamination(split, mode)
            _write_json(paths[f"test_marks_{mode}.json"], marks.to_dict())
            if self.args.predictions:
                analysis = contamination_in_errors(marks, load_predictions(self.args.predictions))
                _write_json(paths[f"error_analysis_{mode}.json"], analysis.to_dict())

        _notify(f"泄漏检测({mode}): 检查 {report.checked_count}, 标记 {report.count}")
        return self.finish(paths)

    def versions(self) -> int:
        source = self.config.input.paths[0]
        names = [self.corpus_name(source, suffix) for suffix in ("original", "wo_duplicates", "wo_near_duplicates")]
        paths = self.plan(names)

        corpus = self.load(source)
        deduplicated, _ = ExactDeduplicator(KeyMode.NORMALIZED, self.config.normalization).deduplicate(corpus)
        detector = NearDuplicateDetector(self.config.near_dup, self.config.normalization, self.workers,
                                         self.config.performance.chunk_size)
        with self.monitor.measure("近重复检测", len(deduplicated)):
            near_free, _ = detector.remove_near_duplicates(deduplicated)

        for name, variant in zip(names, (corpus, deduplicated, near_free)):
            self.write_corpus(self.normalized(variant), paths[name])
        _notify(f"数据版本: {len(corpus)} / {len(deduplicated)} / {len(near_free)}")
        return self.finish(paths)

    def normalized(self, corpus: Corpus) -> Corpus:
        """文本替换为统一提及/URL后的形式（不做大小写折叠）"""
        return corpus.derive(dataclasses.replace(record, text=normalize_text(record.text, self.config.normalization))
                             for record in corpus)

    def rankcmp(self) -> int:
        paths = self.plan(self.report_names("rank_comparison"))
        path_a, path_b = self.config.input.paths
        comparison = compare_rankings(load_scores(path_a), load_scores(path_b),
                                      self.args.label_a, self.args.label_b)
        self.write_reports("rank_comparison", comparison, paths)
        sys.stdout.write(render_report(comparison, "markdown"))
        return self.finish(paths)


COMMANDS: Dict[str, Callable[[AuditCommands], int]] = {
    'audit': AuditCommands.audit,
    'dedup': AuditCommands.dedup,
    'near-dedup': AuditCommands.near_dedup,
    'conflicts': AuditCommands.conflicts,
    'split': AuditCommands.split,
    'leak-check': AuditCommands.leak_check,
    'versions': AuditCommands.versions,
    'rankcmp': AuditCommands.rankcmp,
}


def _common_options() -> argparse.ArgumentParser:
    """所有子命令共享的选项；默认值为 None 表示沿用配置文件"""
    common = argparse.ArgumentParser(add_help=False)

    system = common.add_argument_group("运行")
    system.add_argument('--config', type=str, help='YAML/JSON 配置文件（命令行选项优先）')
    system.add_argument('--output-dir', '-o', type=str, help='输出目录')
    system.add_argument('--force', action='store_const', const=True, help='允许覆盖已存在的输出文件')
    system.add_argument('--workers', type=int, help='近重复计算的进程数（默认: 逻辑核数）')
    system.add_argument('--log-level', type=str.upper, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='日志级别（默认: WARNING）')
    system.add_argument('--log-dir', type=str, help='日志文件目录')
    system.add_argument('--report-format', action='append', choices=REPORT_FORMATS,
                        help='报告格式，可重复（默认: markdown）')
    system.add_argument('--corpus-format', choices=SUPPORTED_FORMATS, help='输出语料格式（默认: jsonl）')

    data = common.add_argument_group("输入")
    data.add_argument('--format', choices=SUPPORTED_FORMATS, help='输入格式（默认按扩展名推断）')
    data.add_argument('--text-field', type=str, help='文本字段（默认: text）')
    data.add_argument('--id-field', type=str, help='ID字段（缺省时使用行序号）')
    data.add_argument('--label-field', type=str, help='标签字段')
    data.add_argument('--group-field', type=str, help='分组/事件字段')
    data.add_argument('--language', choices=[item.value for item in Language], help='语言（默认: english）')
    data.add_argument('--min-tokens', type=int, help='丢弃少于 N 个词的帖子')

    norm = common.add_argument_group("预处理")
    norm.add_argument('--mention-placeholder', type=str, help='提及占位符（默认: @USER）')
    norm.add_argument('--url-placeholder', type=str, help='URL占位符（默认: URL）')
    norm.add_argument('--no-lowercase', action='store_const', const=True, help='比较键不做大小写折叠')
    norm.add_argument('--url-trailing-punctuation', action='store_const', const=True,
                      help='URL末尾标点保留在占位符之外')

    near = common.add_argument_group("近重复")
    near.add_argument('--threshold', type=int, help='编辑距离阈值（默认: 20）')
    near.add_argument('--near-mode', choices=MODES, help='阈值模式（默认: absolute）')
    near.add_argument('--ratio', type=float, help='normalized_ratio 模式的比例')
    near.add_argument('--prefilter', choices=PREFILTERS, help='近似预筛选（默认关闭）')
    return common


def build_parser() -> AuditArgumentParser:
    """构造命令行解析器"""
    parser = AuditArgumentParser(
        prog='corpus-audit',
        description=f'社交媒体语料审计工具 v{__version__} - 重复、近重复、标签冲突与数据泄漏',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例用法:
  corpus-audit audit data.jsonl --label-field label
  corpus-audit versions data.csv --id-field tweet_id -o out/
  corpus-audit leak-check --train train.jsonl --test test.jsonl --mode near --scrub
  corpus-audit rankcmp original.json deduplicated.json
        """
    )
    parser.add_argument('--version', action='store_true', help='显示版本信息')
    common = _common_options()
    sub = parser.add_subparsers(dest='command', metavar='<command>')

    audit = sub.add_parser('audit', parents=[common], help='输出四阶段审计报告')
    audit.add_argument('inputs', nargs='+', help='一个或多个语料文件')

    dedup = sub.add_parser('dedup', parents=[common], help='精确去重')
    dedup.add_argument('input')
    dedup.add_argument('--key-mode', choices=[mode.value for mode in KeyMode], default=KeyMode.NORMALIZED.value,
                       help='比较原文或预处理后的键（默认: normalized）')

    near = sub.add_parser('near-dedup', parents=[common], help='近重复检测与移除')
    near.add_argument('input')

    conflicts = sub.add_parser('conflicts', parents=[common], help='标签冲突报告')
    conflicts.add_argument('input')
    conflicts.add_argument('--resolve', action='store_true', help='同时写出处理后的语料')

    split = sub.add_parser('split', parents=[common], help='训练/测试划分')
    split.add_argument('input')
    split.add_argument('--strategy', choices=['random', 'leave_one_out'], help='划分策略（默认: random）')
    split.add_argument('--train-ratio', type=float, help='训练集比例（默认: 0.8）')
    split.add_argument('--seed', type=int, help='随机种子（默认: 42）')

    leak = sub.add_parser('leak-check', parents=[common], help='跨划分泄漏检测')
    leak.add_argument('--train', required=True, help='训练集文件')
    leak.add_argument('--test', required=True, help='测试集文件')
    leak.add_argument('--mode', choices=LEAKAGE_MODES, default='exact', help='exact 或 near')
    leak.add_argument('--scrub', action='store_true', help='写出清洗后的训练集')
    leak.add_argument('--mark-test', action='store_true', help='标记与训练集重复的测试记录')
    leak.add_argument('--predictions', type=str, help='预测结果文件（配合 --mark-test 做错误分析）')

    versions = sub.add_parser('versions', parents=[common], help='一次输出三个数据版本')
    versions.add_argument('input')

    rankcmp = sub.add_parser('rankcmp', parents=[common], help='比较两组检查点排名')
    rankcmp.add_argument('scores_a')
    rankcmp.add_argument('scores_b')
    rankcmp.add_argument('--label-a', default='original', help='第一组名称')
    rankcmp.add_argument('--label-b', default='deduplicated', help='第二组名称')
    return parser


def _input_paths(args: argparse.Namespace) -> List[str]:
    if args.command == 'audit':
        return list(args.inputs)
    if args.command == 'leak-check':
        return [args.train, args.test]
    if args.command == 'rankcmp':
        return [args.scores_a, args.scores_b]
    return [args.input]


def collect_overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """命令行选项转换为分节覆盖项"""
    return {
        'input': {
            'paths': _input_paths(args),
            'format': args.format,
            'text_field': args.text_field,
            'id_field': args.id_field,
            'label_field': args.label_field,
            'group_field': args.group_field,
            'language': args.language,
            'min_tokens': args.min_tokens,
        },
        'normalization': {
            'mention_placeholder': args.mention_placeholder,
            'url_placeholder': args.url_placeholder,
            'lowercase_key': False if args.no_lowercase else None,
            'url_trailing_punctuation': args.url_trailing_punctuation,
        },
        'near_dup': {
            'threshold': args.threshold,
            'mode': args.near_mode,
            'ratio': args.ratio,
            'prefilter': args.prefilter,
        },
        'split': {
            'strategy': getattr(args, 'strategy', None),
            'ratio': getattr(args, 'train_ratio', None),
            'seed': getattr(args, 'seed', None),
        },
        'output': {
            'directory': args.output_dir,
            'report_formats': args.report_format,
            'corpus_format': args.corpus_format,
            'force': args.force,
        },
        'logging': {
            'level': args.log_level,
            'log_dir': args.log_dir,
        },
        'performance': {
            'workers': args.workers,
        },
    }


COMMAND_OPTIONS = {
    'dedup': ('key_mode',),
    'conflicts': ('resolve',),
    'leak-check': ('mode', 'scrub', 'mark_test', 'predictions'),
    'rankcmp': ('label_a', 'label_b'),
}


def command_options(args: argparse.Namespace) -> Dict[str, Any]:
    """子命令专有选项，随运行配置一起保存"""
    return {name: getattr(args, name) for name in COMMAND_OPTIONS.get(args.command, ())}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    运行命令行

    Returns:
        退出码：0 成功，1 用法/输入错误，2 内部错误
    """
    handler = get_exception_handler()
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code or 0)
    except UsageError as e:
        print(f"corpus-audit: {e.message}", file=sys.stderr)
        print("使用 corpus-audit --help 查看用法", file=sys.stderr)
        return handler.exit_code(e)

    if args.version:
        print_version_info()
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return handler.exit_code(UsageError("缺少子命令"))

    try:
        if args.command == 'leak-check' and args.predictions and not args.mark_test:
            raise UsageError("--predictions 需要同时指定 --mark-test")

        manager = ConfigManager(args.config)
        config = manager.build(args.command, collect_overrides(args), version=__version__,
                               options=command_options(args))
        setup_global_logger(config.logging.log_dir, config.logging.level)
        get_global_logger().info(f"语料审计启动 - 版本: {__version__}, 命令: {args.command}")

        return COMMANDS[args.command](AuditCommands(config, args, manager))

    except KeyboardInterrupt:
        print("\n已中断", file=sys.stderr)
        return EXIT_INTERNAL_ERROR
    except Exception as e:
        code = handler.handle_exception(e, args.command)
        print(_colour(f"错误: {e}", "31"), file=sys.stderr)
        return code


def main():
    """主函数"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
