// Generated by tools/gen_spherical_designs.py from data/spherical_designs/.
// Do not edit by hand.
#pragma once

#include <array>

namespace granular::detail {

inline constexpr std::array<std::array<double, 3>, 12> kSphericalDesign12 = {{
    {6.64655556976374351e-01, 3.89904487687271040e-01, 6.37344083726955390e-01},
    {3.67727522416668617e-01, -5.58812297981427397e-01, -7.43306992353775065e-01},
    {2.86655916999270892e-02, -3.99591449266773369e-01, 9.16245031378273178e-01},
    {7.96223557417742089e-01, -5.64799169485273977e-01, 2.16863885333128781e-01},
    {-8.74207354450482588e-01, -2.91500591464009917e-01, 3.88315473038122527e-01},
    {1.54846025870674475e-01, 9.85930668507578156e-01, -6.29557397562648391e-02},
    {-6.64655556976374351e-01, -3.89904487687271040e-01, -6.37344083726955390e-01},
    {-3.67727522416668617e-01, 5.58812297981427397e-01, 7.43306992353775065e-01},
    {-2.86655916999270892e-02, 3.99591449266773369e-01, -9.16245031378273178e-01},
    {-7.96223557417742089e-01, 5.64799169485273977e-01, -2.16863885333128781e-01},
    {8.74207354450482588e-01, 2.91500591464009917e-01, -3.88315473038122527e-01},
    {-1.54846025870674475e-01, -9.85930668507578156e-01, 6.29557397562648391e-02},
}};

inline constexpr std::array<std::array<double, 3>, 32> kSphericalDesign32 = {{
    {7.54096669066920078e-01, 5.52203726300111830e-01, 3.55540797043668755e-01},
    {-2.24892343993093380e-01, -8.72022860212097739e-01, -4.34740801950776745e-01},
    {-3.37719760181112383e-01, -3.98465613934678609e-01, -8.52742937874522378e-01},
    {-8.49075507866955070e-01, 4.95920813154008489e-01, 1.82025627374661908e-01},
    {9.96403123225530374e-01, 6.20394304291354351e-02, 5.77228299586661150e-02},
    {7.63163074223413118e-01, -8.53426841895176813e-02, 6.40545664568262896e-01},
    {7.72808344751953757e-02, -7.73140765300107780e-01, 6.29508562018008644e-01},
    {3.95098051722494570e-01, 3.89891990192676674e-01, -8.31794304806592777e-01},
    {-7.89207778862097697e-01, 6.00512574145764672e-02, 6.11183219882943662e-01},
    {-3.03218956238889337e-01, 9.52874896298728458e-01, -9.36464527284630935e-03},
    {2.27592631775493964e-01, -2.44264926841651547e-01, 9.42622002436049211e-01},
    {-7.68137705905035828e-01, -5.50424578916929641e-01, 3.27104337621911434e-01},
    {-3.45170843768649427e-01, -9.18954692813880536e-01, 1.90733744175971748e-01},
    {2.56564806934925171e-01, -2.72169459494055410e-01, -9.27414839843076044e-01},
    {-6.72307040015057922e-01, 6.18333482149632352e-01, -4.07022049524225993e-01},
    {-3.84979874771072150e-01, 7.26136356924859672e-01, 5.69663485904742251e-01},
    {-7.54096669066920078e-01, -5.52203726300111830e-01, -3.55540797043668755e-01},
    {2.24892343993093380e-01, 8.72022860212097739e-01, 4.34740801950776745e-01},
    {3.37719760181112383e-01, 3.98465613934678609e-01, 8.52742937874522378e-01},
    {8.49075507866955070e-01, -4.95920813154008489e-01, -1.82025627374661908e-01},
    {-9.96403123225530374e-01, -6.20394304291354351e-02, -5.77228299586661150e-02},
    {-7.63163074223413118e-01, 8.53426841895176813e-02, -6.40545664568262896e-01},
    {-7.72808344751953757e-02, 7.73140765300107780e-01, -6.29508562018008644e-01},
    {-3.95098051722494570e-01, -3.89891990192676674e-01, 8.31794304806592777e-01},
    {7.89207778862097697e-01, -6.00512574145764672e-02, -6.11183219882943662e-01},
    {3.03218956238889337e-01, -9.52874896298728458e-01, 9.36464527284630935e-03},
    {-2.27592631775493964e-01, 2.44264926841651547e-01, -9.42622002436049211e-01},
    {7.68137705905035828e-01, 5.50424578916929641e-01, -3.27104337621911434e-01},
    {3.45170843768649427e-01, 9.18954692813880536e-01, -1.90733744175971748e-01},
    {-2.56564806934925171e-01, 2.72169459494055410e-01, 9.27414839843076044e-01},
    {6.72307040015057922e-01, -6.18333482149632352e-01, 4.07022049524225993e-01},
    {3.84979874771072150e-01, -7.26136356924859672e-01, -5.69663485904742251e-01},
}};

inline constexpr std::array<std::array<double, 3>, 48> kSphericalDesign48 = {{
    {-4.19561080596806690e-02, -1.56172136255872285e-01, 9.86838360043711393e-01},
    {8.18566702923815059e-01, -4.51941103512952691e-01, -3.54538843880228993e-01},
    {-9.10983670029232306e-01, 1.90772692726204424e-01, -3.65669977780599287e-01},
    {-1.08417998141601066e-01, -6.51548320805037551e-01, 7.50819767544184780e-01},
    {-4.95665870587849500e-01, -2.51244879446384961e-01, 8.31379188629569166e-01},
    {5.90091350532205627e-01, 6.63430518250623380e-01, -4.60056676378885920e-01},
    {7.73695998296365484e-01, 3.50149338050491643e-01, 5.28005628078899392e-01},
    {-3.90188539105583654e-01, -5.93438581699582413e-01, -7.03976955376408919e-01},
    {8.76326894666393685e-01, 4.67017939365629520e-01, 1.18090719343378628e-01},
    {9.95717988685780320e-01, -3.82526048030101748e-02, -8.41571460621674677e-02},
    {-6.39378369112886591e-01, 1.34948752354006579e-01, -7.56957155556800654e-01},
    {8.67481303919081959e-01, 2.62548179825177364e-01, -4.22545430245477471e-01},
    {-1.44278641058186524e-01, 9.88847341680248237e-01, 3.69406089055050110e-02},
    {-5.01974517025419287e-01, 8.08895501169665909e-01, 3.06120323475217837e-01},
    {-2.63060045867293701e-01, -8.97024402191952674e-01, -3.55171274374022572e-01},
    {-2.51377456796485987e-01, 3.74328055417133432e-01, 8.92573739890524798e-01},
    {-1.18637447266111890e-01, -9.29654028799877352e-01, 3.48810181678140485e-01},
    {6.71404996185236191e-01, -2.06651002423555441e-01, -7.11695647236121998e-01},
    {-1.71522838277833628e-01, 7.34840342548262138e-01, 6.56193254241971835e-01},
    {-4.43781773522332501e-01, 8.04310611382367036e-01, -3.95148298626093297e-01},
    {7.69865433520898756e-01, -6.14676231583571764e-01, 1.71698411745414725e-01},
    {-2.72435082026267261e-01, -1.91200136092146450e-01, -9.42985489835175383e-01},
    {-3.74946906460846163e-01, 5.07931965689898846e-01, -7.75512692072693910e-01},
    {5.63168863990652468e-01, 8.26165078366141614e-01, 1.70907553883713932e-02},
    {4.19561080596806690e-02, 1.56172136255872285e-01, -9.86838360043711393e-01},
    {-8.18566702923815059e-01, 4.51941103512952691e-01, 3.54538843880228993e-01},
    {9.10983670029232306e-01, -1.90772692726204424e-01, 3.65669977780599287e-01},
    {1.08417998141601066e-01, 6.51548320805037551e-01, -7.50819767544184780e-01},
    {4.95665870587849500e-01, 2.51244879446384961e-01, -8.31379188629569166e-01},
    {-5.90091350532205627e-01, -6.63430518250623380e-01, 4.60056676378885920e-01},
    {-7.73695998296365484e-01, -3.50149338050491643e-01, -5.28005628078899392e-01},
    {3.90188539105583654e-01, 5.93438581699582413e-01, 7.03976955376408919e-01},
    {-8.76326894666393685e-01, -4.67017939365629520e-01, -1.18090719343378628e-01},
    {-9.95717988685780320e-01, 3.82526048030101748e-02, 8.41571460621674677e-02},
    {6.39378369112886591e-01, -1.34948752354006579e-01, 7.56957155556800654e-01},
    {-8.67481303919081959e-01, -2.62548179825177364e-01, 4.22545430245477471e-01},
    {1.44278641058186524e-01, -9.88847341680248237e-01, -3.69406089055050110e-02},
    {5.01974517025419287e-01, -8.08895501169665909e-01, -3.06120323475217837e-01},
    {2.63060045867293701e-01, 8.97024402191952674e-01, 3.55171274374022572e-01},
    {2.51377456796485987e-01, -3.74328055417133432e-01, -8.92573739890524798e-01},
    {1.18637447266111890e-01, 9.29654028799877352e-01, -3.48810181678140485e-01},
    {-6.71404996185236191e-01, 2.06651002423555441e-01, 7.11695647236121998e-01},
    {1.71522838277833628e-01, -7.34840342548262138e-01, -6.56193254241971835e-01},
    {4.43781773522332501e-01, -8.04310611382367036e-01, 3.95148298626093297e-01},
    {-7.69865433520898756e-01, 6.14676231583571764e-01, -1.71698411745414725e-01},
    {2.72435082026267261e-01, 1.91200136092146450e-01, 9.42985489835175383e-01},
    {3.74946906460846163e-01, -5.07931965689898846e-01, 7.75512692072693910e-01},
    {-5.63168863990652468e-01, -8.26165078366141614e-01, -1.70907553883713932e-02},
}};

}  // namespace granular::detail
