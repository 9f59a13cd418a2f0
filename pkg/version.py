"""
版本信息文件
"""

__version__ = "1.0.0"
__version_info__ = (1, 0, 0)

# 版本历史
VERSION_HISTORY = {
    "1.0.0": {
        "date": "2026-10-19",
        "features": [
            "提及/URL 统一的比较键与精确去重",
            "有界编辑距离近重复检测（长度分块，结果精确）",
            "重复簇标签冲突检测与处理",
            "随机/留一事件划分、跨划分泄漏检测与训练集清洗",
            "四阶段审计报告与检查点排名比较",
            "命令行子命令与可复现的运行配置",
        ],
        "improvements": [
            "可选的 MinHash 近似预筛选（默认关闭）",
            "多进程距离计算，输出与进程数无关",
        ],
    },
}


def print_version_info():
    """打印版本信息"""
    current = VERSION_HISTORY.get(__version__, {})

    print(f"语料审计工具 corpus-audit v{__version__}")
    print(f"发布日期: {current.get('date', '未知')}")

    if 'features' in current:
        print("\n功能:")
        for feature in current['features']:
            print(f"  • {feature}")

    if 'improvements' in current:
        print("\n改进:")
        for improvement in current['improvements']:
            print(f"  • {improvement}")


if __name__ == "__main__":
    print_version_info()
