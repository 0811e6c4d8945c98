# 位势工厂模块
from typing import Any, Dict, Optional
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from backend.potential.potential import (Potential, ZeroPotential, HarmonicPotential,
                                         IsotropicQuadraticPotential, AnisotropicQuadraticPotential,
                                         PerturbedQuadraticPotential)
from backend.utils.exceptions import ConfigException, DomainException
from config.enums import PotentialName


class PotentialFactory:
    """位势工厂类

    根据位势名枚举和参数字典创建对应的位势实例
    """

    @staticmethod
    def create_potential(name: PotentialName, params: Optional[Dict[str, Any]] = None) -> Potential:
        """创建位势实例

        Args:
            name: 位势名枚举
            params: 构造参数
                ISOTROPIC_QUADRATIC: {"delta": float}
                ANISOTROPIC_QUADRATIC: {"coeffs": [float, ...]}
                PERTURBED_QUADRATIC: {"delta": float, "eps": float, "k": float 或 [float, ...]}

        Returns:
            位势实例

        Raises:
            ConfigException: 参数缺失或取值非法
        """
        params = dict(params or {})
        try:
            if name == PotentialName.ZERO:
                return ZeroPotential()
            elif name == PotentialName.HARMONIC:
                return HarmonicPotential()
            elif name == PotentialName.ISOTROPIC_QUADRATIC:
                return IsotropicQuadraticPotential(float(PotentialFactory._require(params, "delta")))
            elif name == PotentialName.ANISOTROPIC_QUADRATIC:
                coeffs = PotentialFactory._require(params, "coeffs")
                if not isinstance(coeffs, list):
                    raise ConfigException(f"'potential.params.coeffs' 必须是列表，实际: {coeffs!r}")
                return AnisotropicQuadraticPotential(coeffs)
            elif name == PotentialName.PERTURBED_QUADRATIC:
                return PerturbedQuadraticPotential(
                    float(PotentialFactory._require(params, "delta")),
                    float(PotentialFactory._require(params, "eps")),
                    params.get("k", 1.0),
                )
        except DomainException as e:
            raise ConfigException(f"位势参数非法: {e}") from e
        except (TypeError, ValueError) as e:
            raise ConfigException(f"位势参数类型错误: {e}") from e
        raise ConfigException(f"未知的位势: {name}")

    @staticmethod
    def _require(params: Dict[str, Any], key: str) -> Any:
        if key not in params:
            raise ConfigException(f"'potential.params' 缺少必需字段 '{key}'")
        return params[key]
