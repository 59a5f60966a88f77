package com.big.lib;

public class Lib21 {
    public boolean configureNeighbourRelationParameter00(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyPowerProfileParameter01(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreAlarmThresholdParameter02(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectTraceSessionParameter03(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishTimerScheduleParameter04(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateNeighbourRelationParameter05(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configurePowerProfileParameter06(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyAlarmThresholdParameter07(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreTraceSessionParameter08(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectTimerScheduleParameter09(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishNeighbourRelationParameter10(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validatePowerProfileParameter11(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureAlarmThresholdParameter12(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyTraceSessionParameter13(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreTimerScheduleParameter14(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectNeighbourRelationParameter15(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishPowerProfileParameter16(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateAlarmThresholdParameter17(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureTraceSessionParameter18(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyTimerScheduleParameter19(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreNeighbourRelationParameter20(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectPowerProfileParameter21(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishAlarmThresholdParameter22(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateTraceSessionParameter23(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureTimerScheduleParameter24(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyNeighbourRelationParameter25(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restorePowerProfileParameter26(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectAlarmThresholdParameter27(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishTraceSessionParameter28(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateTimerScheduleParameter29(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureNeighbourRelationParameter30(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyPowerProfileParameter31(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreAlarmThresholdParameter32(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectTraceSessionParameter33(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishTimerScheduleParameter34(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateNeighbourRelationParameter35(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configurePowerProfileParameter36(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyAlarmThresholdParameter37(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreTraceSessionParameter38(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectTimerScheduleParameter39(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishNeighbourRelationParameter40(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validatePowerProfileParameter41(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureAlarmThresholdParameter42(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyTraceSessionParameter43(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreTimerScheduleParameter44(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectNeighbourRelationParameter45(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishPowerProfileParameter46(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateAlarmThresholdParameter47(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureTraceSessionParameter48(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyTimerScheduleParameter49(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restoreNeighbourRelationParameter50(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectPowerProfileParameter51(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishAlarmThresholdParameter52(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateTraceSessionParameter53(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean configureTimerScheduleParameter54(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean verifyNeighbourRelationParameter55(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean restorePowerProfileParameter56(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean collectAlarmThresholdParameter57(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean publishTraceSessionParameter58(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }

    public boolean validateTimerScheduleParameter59(String cellIdentifier, int powerLevelDecibels, boolean forceApply) {
        return forceApply;
    }
}
